from __future__ import absolute_import

import numpy as np

from ..autodiff import ShapeError, matmul, mean, mul, sub


def reconstructed_power(tape, coefficients):
    """Power adapter: per-pixel sum of the decomposition coefficients, shape (1, N')."""
    return matmul(tape.constant(np.ones((1, coefficients.shape[0]))), coefficients)


def loss_power(tape, coefficients, span):
    """Mean squared error between the reconstructed power and the window-mean SPAN."""
    span = np.asarray(span, dtype=np.float64)
    if span.size != coefficients.shape[1]:
        raise ShapeError("span of shape {} does not match {} feature pixels".format(span.shape, coefficients.shape[1]))
    if np.any(span < 0):
        raise ValueError("span must be non-negative")
    diff = sub(reconstructed_power(tape, coefficients), tape.constant(span.reshape(1, -1)))
    return mean(mul(diff, diff))
