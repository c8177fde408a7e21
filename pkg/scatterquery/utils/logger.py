import logging
import os
import sys
import os.path as osp

LOG_FORMAT = "%(asctime)s %(name)s %(levelname)s: %(message)s"
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


class StdoutHandler(logging.StreamHandler):
    """Writes to whatever ``sys.stdout`` is at emit time, so a replaced stdout is never held closed."""

    def __init__(self):
        super(StdoutHandler, self).__init__(sys.stdout)

    @property
    def stream(self):
        return sys.stdout

    @stream.setter
    def stream(self, value):
        pass


def teardown_logger(name):
    """Flush, detach and close every handler of ``name``."""
    logger = logging.getLogger(name)
    for handler in list(logger.handlers):
        handler.flush()
        logger.removeHandler(handler)
        handler.close()


def setup_logger(name, save_dir, if_train, verbose=False):
    """Stream to stdout and, when ``save_dir`` is given, to train_log.txt / test_log.txt there.

    Handlers left by an earlier run in the same process are closed first.
    """
    teardown_logger(name)
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)
    ch = StdoutHandler()
    ch.setLevel(logging.DEBUG if verbose else logging.INFO)
    ch.setFormatter(formatter)
    logger.addHandler(ch)

    if save_dir:
        if not osp.exists(save_dir):
            os.makedirs(save_dir)
        log_name = "train_log.txt" if if_train else "test_log.txt"
        fh = logging.FileHandler(os.path.join(save_dir, log_name), mode='w')
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(formatter)
        logger.addHandler(fh)

    return logger


def log_config(logger, cfg, config_file=''):
    if config_file:
        logger.info("Loaded configuration file {}".format(config_file))
    logger.info("Running with config:\n{}".format(cfg))
