import argparse
import os
import os.path as osp

from scatterquery.config import cfg
from scatterquery.datasets import make_dataset, scene_from_config
from scatterquery.model import make_model
from scatterquery.processor import do_inference
from scatterquery.utils.cpxr import read_cpxr
from scatterquery.utils.logger import log_config, setup_logger


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Scattering query evaluation")
    parser.add_argument(
        "--config_file", default="", help="path to config file", type=str
    )
    parser.add_argument("--input", nargs="+", default=[], help="CPXR rasters, one synthesized from SYNTH when omitted")
    parser.add_argument("opts", help="Modify config options using the command-line", default=None,
                        nargs=argparse.REMAINDER)

    args = parser.parse_args()

    if args.config_file != "":
        cfg.merge_from_file(args.config_file)
    cfg.merge_from_list(args.opts)
    cfg.freeze()

    output_dir = cfg.OUTPUT_DIR
    if output_dir and not os.path.exists(output_dir):
        os.makedirs(output_dir)

    logger = setup_logger("scatterquery", output_dir, if_train=False)
    logger.info(args)
    log_config(logger, cfg, args.config_file)

    if args.input:
        samples = [make_dataset(cfg, read_cpxr(fpath), name=osp.splitext(osp.basename(fpath))[0])
                   for fpath in args.input]
    else:
        samples = [make_dataset(cfg, scene_from_config(cfg), name='synthetic')]

    model = make_model(cfg)
    model.load_param(cfg.TEST.WEIGHT)
    do_inference(cfg, model, samples)
