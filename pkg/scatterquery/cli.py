"""Command-line surface: ``scatterquery <command> [--seed N] [--config FILE] [--out DIR] [KEY VALUE ...]``.

Each run writes its artifacts plus one ``manifest.json`` into the output
directory. Failures print ``{"error": code, "message": text}`` to stderr and
exit 1; usage errors exit 2.
"""
from __future__ import absolute_import, print_function

import argparse
import json
import logging
import re
import sys

import numpy as np
import os.path as osp

from . import __version__
from .autodiff import NonFiniteError, ShapeError
from .config import CONFIG_VERSION, get_cfg_defaults
from .datasets import layout_region_map, make_dataset, scene_from_config
from .labels import BinaryLabelStack, RayleighFitError, generate_labels
from .loss import make_loss
from .model import EncoderInputError, make_model
from .polsar import ComponentStack, PolsarRaster, RasterError, bases_to_json, boxcar_coherency, decompose_raster
from .polsar import span_raster
from .processor import TrainingDivergedError, do_inference, do_train
from .processor.processor import checkpoint_meta, evaluate_samples
from .queries import independence_report, load_queries, save_queries, shipped_queries
from .solver import make_optimizer
from .utils.composite import COMPOSITE_MODES, emit_composite, save_png
from .utils.cpxr import read_cpxr, write_cpxr
from .utils.iotools import mkdir_if_missing, write_json
from .utils.logger import log_config, setup_logger, teardown_logger
from .utils.manifest import RunManifest
from .utils.serialization import load_planes, save_checkpoint, save_planes

logger = logging.getLogger("scatterquery.cli")

ERROR_CODES = (
    (RasterError, 'raster'),
    (RayleighFitError, 'labels.fit'),
    (EncoderInputError, 'model.input'),
    (TrainingDivergedError, 'train.diverged'),
    (NonFiniteError, 'autodiff.nonfinite'),
    (ShapeError, 'autodiff.shape'),
    (KeyError, 'key'),
    (OSError, 'io'),
    (ValueError, 'value'),
)


class ConfigError(ValueError):
    code = 'config'


def error_code(e):
    if isinstance(getattr(e, 'code', None), str):
        return e.code
    for kind, code in ERROR_CODES:
        if isinstance(e, kind):
            return code
    return 'error'


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


CONFIG_KEY = re.compile(r'^[A-Z][A-Z0-9_]*(\.[A-Z][A-Z0-9_]*)*$')


def split_overrides(args, extras):
    """Move KEY VALUE pairs swallowed by list arguments back in front of ``extras``."""
    moved = []
    for dest in ('input', 'labels'):
        values = getattr(args, dest, None)
        if not isinstance(values, list):
            continue
        for i, value in enumerate(values):
            if CONFIG_KEY.match(value):
                moved.extend(values[i:])
                setattr(args, dest, values[:i])
                break
    return moved + list(extras)


def check_opts(parser, opts):
    """Trailing KEY VALUE pairs; anything flag-like is an unknown option."""
    for item in opts:
        if item.startswith('-') and not _is_number(item):
            parser.error("unrecognized arguments: {}".format(item))
    if len(opts) % 2:
        parser.error("config overrides must come in KEY VALUE pairs, got {}".format(' '.join(opts)))
    return list(opts)


def load_cfg(args, opts):
    cfg = get_cfg_defaults()
    if args.config:
        cfg.merge_from_file(args.config)
    try:
        cfg.merge_from_list(opts)
    except (KeyError, AssertionError, ValueError) as e:
        raise ConfigError("bad config override: {}".format(e))
    if cfg.CONFIG_VERSION != CONFIG_VERSION:
        raise ConfigError("config version {} is not supported, expected {}".format(cfg.CONFIG_VERSION, CONFIG_VERSION))
    if args.seed is not None:
        cfg.SEED = args.seed
    if args.out:
        cfg.OUTPUT_DIR = args.out
    cfg.freeze()
    return cfg


def _load_labels(fpath):
    planes, sidecar = load_planes(fpath)
    return BinaryLabelStack.from_planes(planes, sidecar)


def _load_components(fpath):
    planes, _ = load_planes(fpath)
    return ComponentStack(planes)


def cmd_synth(args, cfg, manifest):
    raster = scene_from_config(cfg)
    out = cfg.OUTPUT_DIR
    manifest.add_output(write_cpxr(raster, osp.join(out, 'scene.cpxr')))
    regions = layout_region_map(cfg.SYNTH.LAYOUT, cfg.SYNTH.HEIGHT, cfg.SYNTH.WIDTH)
    manifest.add_output(save_planes(regions.astype(np.uint8), osp.join(out, 'regions.npy'),
                                    {'layout': cfg.SYNTH.LAYOUT, 'region_powers': cfg.SYNTH.REGION_POWERS}))
    manifest.add_output(osp.join(out, 'regions.json'))
    logger.info("Synthesized {}x{} '{}' scene".format(raster.height, raster.width, cfg.SYNTH.LAYOUT))


def cmd_convert(args, cfg, manifest):
    manifest.add_input(args.input)
    stem, ext = osp.splitext(osp.basename(args.input))
    if ext == '.npy':
        raster = PolsarRaster.from_array(np.load(args.input, allow_pickle=False))
        target = osp.join(cfg.OUTPUT_DIR, stem + '.cpxr')
        write_cpxr(raster, target)
    elif ext == '.cpxr':
        raster = read_cpxr(args.input)
        target = osp.join(cfg.OUTPUT_DIR, stem + '.npy')
        mkdir_if_missing(cfg.OUTPUT_DIR)
        np.save(target, raster.to_array().astype(np.complex64), allow_pickle=False)
    else:
        raise ValueError("cannot convert '{}': expected a .npy or .cpxr file".format(args.input))
    manifest.add_output(target)
    logger.info("Converted {} -> {}".format(osp.basename(args.input), osp.basename(target)))


def cmd_span(args, cfg, manifest):
    manifest.add_input(args.input)
    span = span_raster(read_cpxr(args.input))
    target = osp.join(cfg.OUTPUT_DIR, 'span.npy')
    save_planes(span.astype(np.float32), target, {'mean': float(span.mean()), 'max': float(span.max())})
    manifest.add_output(target)
    manifest.add_output(osp.join(cfg.OUTPUT_DIR, 'span.json'))


def cmd_decompose(args, cfg, manifest):
    manifest.add_input(args.input)
    stack = decompose_raster(boxcar_coherency(read_cpxr(args.input), cfg.INPUT.WINDOW))
    sidecar = stack.sidecar()
    sidecar['window'] = int(cfg.INPUT.WINDOW)
    target = osp.join(cfg.OUTPUT_DIR, 'components.npy')
    save_planes(stack.powers.astype(np.float32), target, sidecar)
    manifest.add_output(target)
    manifest.add_output(osp.join(cfg.OUTPUT_DIR, 'components.json'))
    logger.info("Decomposed: {}".format(sidecar.get('branch_counts')))


def cmd_labels(args, cfg, manifest):
    manifest.add_input(args.input)
    labels = generate_labels(_load_components(args.input))
    target = osp.join(cfg.OUTPUT_DIR, 'labels.npy')
    save_planes(labels.to_planes(), target, labels.sidecar())
    manifest.add_output(target)
    manifest.add_output(osp.join(cfg.OUTPUT_DIR, 'labels.json'))


def cmd_queries_init(args, cfg, manifest):
    queries = shipped_queries(m=cfg.QUERIES.NUM_SAMPLES, seed=cfg.QUERIES.SEED,
                              embed_dim=cfg.QUERIES.EMBED_DIM, query_dim=cfg.QUERIES.QUERY_DIM)
    target = osp.join(cfg.OUTPUT_DIR, 'queries.sqqy')
    meta = save_queries(queries, target)
    manifest.add_output(target)
    write_json(meta, osp.join(cfg.OUTPUT_DIR, 'queries.json'))
    manifest.add_output(osp.join(cfg.OUTPUT_DIR, 'queries.json'))
    write_json(bases_to_json(), osp.join(cfg.OUTPUT_DIR, 'bases.json'))
    manifest.add_output(osp.join(cfg.OUTPUT_DIR, 'bases.json'))


def cmd_queries_report(args, cfg, manifest):
    if args.queries:
        manifest.add_input(args.queries)
        queries = load_queries(args.queries)
    else:
        queries = shipped_queries(m=cfg.QUERIES.NUM_SAMPLES, seed=cfg.QUERIES.SEED,
                                  embed_dim=cfg.QUERIES.EMBED_DIM, query_dim=cfg.QUERIES.QUERY_DIM)
    report = independence_report(queries)
    target = osp.join(cfg.OUTPUT_DIR, 'independence.json')
    write_json(report.to_dict(), target)
    manifest.add_output(target)
    logger.info("Max off-diagonal |cos|: {:.4f} ({})".format(report.max_off_diagonal,
                                                              'passed' if report.passed else 'failed'))


def _training_samples(args, cfg, manifest):
    """One sample per input raster, in command-line order."""
    if args.labels and len(args.labels) != len(args.input):
        raise ValueError("got {} label files for {} rasters".format(len(args.labels), len(args.input)))
    samples = []
    for i, fpath in enumerate(args.input):
        manifest.add_input(fpath)
        raster = read_cpxr(fpath)
        labels = None
        if args.labels:
            manifest.add_input(args.labels[i])
            labels = _load_labels(args.labels[i])
        samples.append(make_dataset(cfg, raster, labels, name=osp.splitext(osp.basename(fpath))[0]))
    return samples


def cmd_pretrain(args, cfg, manifest):
    samples = _training_samples(args, cfg, manifest)
    model = make_model(cfg)
    result = do_train(cfg, model, samples, make_optimizer(cfg, model), make_loss(cfg))
    out = cfg.OUTPUT_DIR
    weights = osp.join(out, cfg.MODEL.NAME + '.sqck')
    save_checkpoint(model.state_dict(), weights, checkpoint_meta(cfg, samples, len(result.trace)))
    manifest.add_output(weights)
    manifest.add_output(osp.splitext(weights)[0] + '.json')
    trace_path = osp.join(out, 'loss_trace.csv')
    result.trace.to_csv(trace_path)
    manifest.add_output(trace_path)
    final = evaluate_samples(model, samples, cfg.TEST.THRESHOLD)
    metrics_path = osp.join(out, 'metrics.json')
    write_json({'final': final.to_dict(),
                'history': [{'iter': it, 'metrics': m.to_dict()} for it, m in result.history]}, metrics_path)
    manifest.add_output(metrics_path)


def cmd_eval(args, cfg, manifest):
    weights = args.weights or cfg.TEST.WEIGHT
    if not weights:
        raise ValueError("eval needs --weights or TEST.WEIGHT")
    samples = _training_samples(args, cfg, manifest)
    manifest.add_input(weights)
    model = make_model(cfg)
    model.load_param(weights)
    metrics = do_inference(cfg, model, samples)
    target = osp.join(cfg.OUTPUT_DIR, 'metrics.json')
    write_json(metrics.to_dict(), target)
    manifest.add_output(target)


def cmd_composite(args, cfg, manifest):
    manifest.add_input(args.input)
    if args.mode == 'pauli':
        source = read_cpxr(args.input)
    else:
        source = _load_components(args.input)
    target = osp.join(cfg.OUTPUT_DIR, 'composite_{}.png'.format(args.mode))
    save_png(emit_composite(source, args.mode), target)
    manifest.add_output(target)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="overrides SEED")
    common.add_argument("--config", default="", help="path to a YAML config file", type=str)
    common.add_argument("--out", default="", help="output directory, overrides OUTPUT_DIR", type=str)
    common.add_argument("--verbose", action="store_true", help="log debug messages to stdout")

    parser = argparse.ArgumentParser(prog="scatterquery", description="PolSAR decomposition and query pretraining",
                                     epilog="Trailing KEY VALUE pairs override config entries.")
    parser.add_argument("--version", action="version", version="%(prog)s {}".format(__version__))
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    sub = commands.add_parser("synth", parents=[common], help="synthesize a scene from the SYNTH config")
    sub.set_defaults(func=cmd_synth)
    sub = commands.add_parser("convert", parents=[common], help="convert between .npy and .cpxr")
    sub.add_argument("input")
    sub.set_defaults(func=cmd_convert)
    sub = commands.add_parser("span", parents=[common], help="SPAN power of a raster")
    sub.add_argument("input")
    sub.set_defaults(func=cmd_span)
    sub = commands.add_parser("decompose", parents=[common], help="Yamaguchi decomposition of a raster")
    sub.add_argument("input")
    sub.set_defaults(func=cmd_decompose)
    sub = commands.add_parser("labels", parents=[common], help="Rayleigh pseudo-labels of a component stack")
    sub.add_argument("input")
    sub.set_defaults(func=cmd_labels)

    queries = commands.add_parser("queries", help="scattering queries")
    actions = queries.add_subparsers(dest="action", metavar="action")
    actions.required = True
    sub = actions.add_parser("init", parents=[common], help="write the query blob")
    sub.set_defaults(func=cmd_queries_init)
    sub = actions.add_parser("report", parents=[common], help="pairwise cosine report")
    sub.add_argument("--queries", default="", help="query blob, defaults to the shipped queries")
    sub.set_defaults(func=cmd_queries_report)

    sub = commands.add_parser("pretrain", parents=[common], help="train on one or more rasters")
    sub.add_argument("input", nargs="+")
    sub.add_argument("--labels", nargs="+", default=[], help="label planes per raster, derived when omitted")
    sub.set_defaults(func=cmd_pretrain)
    sub = commands.add_parser("eval", parents=[common], help="score a checkpoint on one or more rasters")
    sub.add_argument("input", nargs="+")
    sub.add_argument("--weights", default="", help="checkpoint, defaults to TEST.WEIGHT")
    sub.add_argument("--labels", nargs="+", default=[], help="label planes per raster, derived when omitted")
    sub.set_defaults(func=cmd_eval)
    sub = commands.add_parser("composite", parents=[common], help="8-bit RGB composite")
    sub.add_argument("input")
    sub.add_argument("--mode", choices=COMPOSITE_MODES, default='pauli')
    sub.set_defaults(func=cmd_composite)
    return parser


def command_name(args):
    return args.command if getattr(args, 'action', None) is None else '{} {}'.format(args.command, args.action)


def cli(argv=None):
    parser = build_parser()
    try:
        args, extras = parser.parse_known_args(argv)
        opts = check_opts(parser, split_overrides(args, extras))
        if isinstance(getattr(args, 'input', None), list) and not args.input:
            parser.error("{} needs at least one input raster".format(args.command))
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    try:
        cfg = load_cfg(args, opts)
        mkdir_if_missing(cfg.OUTPUT_DIR)
        setup_logger("scatterquery", cfg.OUTPUT_DIR, if_train=args.command == 'pretrain', verbose=args.verbose)
        log_config(logger, cfg, args.config)
        manifest = RunManifest({'name': command_name(args), 'opts': opts}, cfg, cfg.OUTPUT_DIR, __version__)
        if args.config:
            manifest.add_input(args.config)
        args.func(args, cfg, manifest)
        manifest.write()
    except Exception as e:
        logger.debug("command failed", exc_info=True)
        print(json.dumps({'error': error_code(e), 'message': str(e)}, sort_keys=True), file=sys.stderr)
        return 1
    finally:
        teardown_logger("scatterquery")
    return 0


def main():
    sys.exit(cli())


if __name__ == '__main__':
    main()
