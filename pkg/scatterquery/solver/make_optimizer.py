from __future__ import absolute_import

import logging

import numpy as np

logger = logging.getLogger("scatterquery.train")


def clip_gradients(grads, clip):
    """Rescale each gradient whose L2 norm exceeds ``clip``, returns the norms before clipping."""
    norms = {}
    for name, grad in grads.items():
        norm = float(np.sqrt(np.sum(grad * grad)))
        norms[name] = norm
        clip_coef = clip / (norm + 1e-6)
        if clip_coef < 1:
            grads[name] = grad * clip_coef
    return norms


class GradientDescent(object):
    """Plain gradient descent with a fixed learning rate, updating the state dict in place.

    ``clip`` > 0 caps the norm of every parameter's gradient before the step.
    """

    def __init__(self, params, lr, clip=0.0):
        if not lr > 0:
            raise ValueError("learning rate must be positive, got {}".format(lr))
        if clip < 0:
            raise ValueError("gradient clip must be non-negative, got {}".format(clip))
        self.params = params
        self.lr = float(lr)
        self.clip = float(clip)

    def get_lr(self):
        return [self.lr]

    def step(self, grads):
        for name, value in self.params.items():
            grad = grads.get(name)
            if grad is not None and grad.shape != value.shape:
                raise ValueError("gradient of '{}' has shape {}, expected {}".format(name, grad.shape, value.shape))
        grads = {name: grad for name, grad in grads.items() if name in self.params}
        if self.clip:
            clip_gradients(grads, self.clip)
        for name, grad in grads.items():
            self.params[name] = self.params[name] - self.lr * grad

    def grad_norm(self, grads):
        return float(np.sqrt(sum(np.sum(g * g) for g in grads.values())))


__factory = {
    'GD': GradientDescent,
}


def make_optimizer(cfg, model):
    name = cfg.SOLVER.OPTIMIZER_NAME
    if name not in __factory:
        raise KeyError("Unknown optimizer:", name)
    logger.info("using {} with lr {:.2e}, gradient clip {}".format(name, cfg.SOLVER.BASE_LR, cfg.SOLVER.CLIP_GRAD))
    return __factory[name](model.state_dict(), cfg.SOLVER.BASE_LR, cfg.SOLVER.CLIP_GRAD)
