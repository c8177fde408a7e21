import argparse
import os
import os.path as osp

from scatterquery.config import cfg
from scatterquery.datasets import make_dataset, scene_from_config
from scatterquery.loss import make_loss
from scatterquery.model import make_model
from scatterquery.processor import do_train
from scatterquery.processor.processor import checkpoint_meta
from scatterquery.solver import make_optimizer
from scatterquery.utils.cpxr import read_cpxr
from scatterquery.utils.logger import log_config, setup_logger
from scatterquery.utils.serialization import save_checkpoint

if __name__ == '__main__':

    parser = argparse.ArgumentParser(description="Scattering query pretraining")
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

    logger = setup_logger("scatterquery", output_dir, if_train=True)
    logger.info("Saving model in the path :{}".format(cfg.OUTPUT_DIR))
    log_config(logger, cfg, args.config_file)

    if args.input:
        samples = [make_dataset(cfg, read_cpxr(fpath), name=osp.splitext(osp.basename(fpath))[0])
                   for fpath in args.input]
    else:
        samples = [make_dataset(cfg, scene_from_config(cfg), name='synthetic')]

    model = make_model(cfg)
    loss_func = make_loss(cfg)
    optimizer = make_optimizer(cfg, model)

    result = do_train(
        cfg,
        model,
        samples,
        optimizer,
        loss_func
    )
    save_checkpoint(model.state_dict(), osp.join(output_dir, cfg.MODEL.NAME + '.sqck'),
                    checkpoint_meta(cfg, samples, len(result.trace)))
    result.trace.to_csv(osp.join(output_dir, 'loss_trace.csv'))
