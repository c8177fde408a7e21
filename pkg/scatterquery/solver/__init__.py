from .make_optimizer import GradientDescent, clip_gradients, make_optimizer
