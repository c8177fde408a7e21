from __future__ import absolute_import

import math

import numpy as np

from ..autodiff import ShapeError, log_sigmoid, mean, mul, scale, sub

PROB_EPS = 1e-7
LOG_FLOOR = math.log(PROB_EPS)
LOG_CEIL = math.log1p(-PROB_EPS)


def loss_yamaguchi(tape, logits, labels):
    """Mean binary cross entropy of the four Yamaguchi coefficient maps.

    -(1/n) sum [Y log R + (1 - Y) log(1 - R)] with R = sigmoid(logits) clamped
    to [1e-7, 1 - 1e-7]. log R and log(1 - R) come from the logits directly,
    and the clamp does not cut the gradient of saturated pixels.
    ``labels`` holds the majority-voted {0, 1} masks in any shape of ``logits.size``.
    """
    labels = np.asarray(labels, dtype=np.float64)
    if labels.size != logits.size:
        raise ShapeError("labels of shape {} do not match predictions of shape {}"
                         .format(labels.shape, logits.shape))
    y = tape.constant(labels.reshape(logits.shape))
    one = tape.constant(np.ones(logits.shape))
    log_r = log_sigmoid(logits, LOG_FLOOR, LOG_CEIL)
    log_not_r = log_sigmoid(scale(logits, -1.0), LOG_FLOOR, LOG_CEIL)
    likelihood = mul(y, log_r) + mul(sub(one, y), log_not_r)
    return scale(mean(likelihood), -1.0)
