from __future__ import absolute_import

import logging
from collections import OrderedDict

import numpy as np

from .tape import Tape

logger = logging.getLogger("scatterquery.autodiff")


def _evaluate(f, arrays, with_grad):
    tape = Tape()
    values = OrderedDict((name, tape.leaf(array, name=name)) for name, array in arrays.items())
    loss = f(tape, values)
    grads = tape.backward(loss) if with_grad else None
    return loss.item(), grads


def grad_check(f, leaves, h=1e-5, max_elements=None, seed=0, floor=1e-5):
    """Worst relative error between backward() and central differences.

    ``f(tape, values)`` builds a scalar on ``tape`` from ``values``, a dict of
    leaf DiffValues keyed like ``leaves``. Relative error is
    |a - n| / max(|a|, |n|, floor). With ``max_elements`` only that many
    seeded entries of each leaf are perturbed.
    """
    arrays = OrderedDict((name, np.array(value, dtype=np.float64)) for name, value in leaves.items())
    _, analytic = _evaluate(f, arrays, with_grad=True)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, array in arrays.items():
        indices = np.arange(array.size)
        if max_elements is not None and array.size > max_elements:
            indices = np.sort(rng.choice(array.size, size=max_elements, replace=False))
        for index in indices:
            shifted = OrderedDict(arrays)
            bumped = array.copy()
            bumped.flat[index] = array.flat[index] + h
            shifted[name] = bumped
            upper, _ = _evaluate(f, shifted, with_grad=False)
            bumped = array.copy()
            bumped.flat[index] = array.flat[index] - h
            shifted[name] = bumped
            lower, _ = _evaluate(f, shifted, with_grad=False)
            numeric = (upper - lower) / (2.0 * h)
            exact = float(analytic[name].flat[index])
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
            if error > worst:
                worst = error
        logger.debug("grad_check {}: {} of {} entries checked, worst so far {:.3e}"
                     .format(name, len(indices), array.size, worst))
    return worst
