from __future__ import absolute_import

import logging
from typing import NamedTuple

from ..autodiff import DiffValue, add, scale
from .decomposition_loss import loss_yamaguchi
from .power_loss import loss_power

logger = logging.getLogger("scatterquery.train")


class LossTerms(NamedTuple):
    total: object
    yamaguchi: object
    power: object

    def values(self):
        return tuple(term.item() if isinstance(term, DiffValue) else float(term) for term in self)


def total_loss(ly, lp, alpha=0.1):
    """ly + alpha * lp, on DiffValues or plain numbers."""
    if not alpha >= 0:
        raise ValueError("alpha must be non-negative, got {}".format(alpha))
    if isinstance(ly, DiffValue):
        return add(ly, scale(lp, alpha))
    return ly + alpha * lp


def make_loss(cfg):
    alpha = cfg.SOLVER.ALPHA
    logger.info("using decomposition loss with power conservation weight alpha: {}".format(alpha))

    def loss_func(tape, heads, sample):
        ly = loss_yamaguchi(tape, heads.yamaguchi_logits, sample.labels)
        lp = loss_power(tape, heads.decomposition, sample.span)
        return LossTerms(total_loss(ly, lp, alpha), ly, lp)

    return loss_func
