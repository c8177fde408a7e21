from __future__ import absolute_import

from .iotools import mkdir_if_missing, read_json, sha256_file, write_json
from .logger import log_config, setup_logger, teardown_logger
from .meter import AverageMeter, LossTrace
