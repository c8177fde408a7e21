from __future__ import absolute_import

import numpy as np
from scipy.special import expit

from .tape import Context, NonFiniteError, ShapeError, TapeError

# additive mask entry of a blocked position
BLOCKED = -1e9


class Function(object):
    """One differentiable op: ``forward(ctx, *arrays, **params)`` and ``backward(ctx, grad)``.

    ``backward`` returns one gradient per array input, or ``None`` for inputs
    that take no gradient.
    """

    @staticmethod
    def forward(ctx, *arrays, **params):
        raise NotImplementedError

    @staticmethod
    def backward(ctx, grad_output):
        raise NotImplementedError

    @classmethod
    def apply(cls, *inputs, **params):
        if not inputs:
            raise TapeError("{} needs at least one input".format(cls.__name__))
        ctx = Context()
        output = np.asarray(cls.forward(ctx, *[v.data for v in inputs], **params), dtype=np.float64)
        if not np.all(np.isfinite(output)):
            raise NonFiniteError("{} produced non-finite values".format(cls.__name__))
        return inputs[0].tape.record(cls, ctx, inputs, output)


def _same_shape(name, a, b):
    if a.shape != b.shape:
        raise ShapeError("{}: shapes {} and {} differ".format(name, a.shape, b.shape))


class Add(Function):

    @staticmethod
    def forward(ctx, a, b):
        _same_shape('add', a, b)
        return a + b

    @staticmethod
    def backward(ctx, grad_output):
        return grad_output, grad_output


class Sub(Function):

    @staticmethod
    def forward(ctx, a, b):
        _same_shape('sub', a, b)
        return a - b

    @staticmethod
    def backward(ctx, grad_output):
        return grad_output, -grad_output


class Mul(Function):

    @staticmethod
    def forward(ctx, a, b):
        _same_shape('mul', a, b)
        ctx.save_for_backward(a, b)
        return a * b

    @staticmethod
    def backward(ctx, grad_output):
        a, b = ctx.saved_arrays
        return grad_output * b, grad_output * a


class Scale(Function):

    @staticmethod
    def forward(ctx, x, factor=1.0):
        ctx.factor = float(factor)
        return ctx.factor * x

    @staticmethod
    def backward(ctx, grad_output):
        return ctx.factor * grad_output


class MatMul(Function):

    @staticmethod
    def forward(ctx, a, b):
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ShapeError("matmul: cannot multiply {} by {}".format(a.shape, b.shape))
        ctx.save_for_backward(a, b)
        return a @ b

    @staticmethod
    def backward(ctx, grad_output):
        a, b = ctx.saved_arrays
        return grad_output @ b.T, a.T @ grad_output


class Transpose(Function):

    @staticmethod
    def forward(ctx, x):
        if x.ndim != 2:
            raise ShapeError("transpose expects a matrix, got shape {}".format(x.shape))
        return x.T

    @staticmethod
    def backward(ctx, grad_output):
        return grad_output.T


class Softmax(Function):
    """Softmax over the last axis with max-subtraction."""

    @staticmethod
    def forward(ctx, x):
        if x.ndim not in (1, 2):
            raise ShapeError("softmax expects a vector or matrix, got shape {}".format(x.shape))
        e = np.exp(x - x.max(axis=-1, keepdims=True))
        y = e / e.sum(axis=-1, keepdims=True)
        ctx.save_for_backward(y)
        return y

    @staticmethod
    def backward(ctx, grad_output):
        y, = ctx.saved_arrays
        return y * (grad_output - np.sum(grad_output * y, axis=-1, keepdims=True))


class Sigmoid(Function):

    @staticmethod
    def forward(ctx, x):
        y = expit(x)
        ctx.save_for_backward(y)
        return y

    @staticmethod
    def backward(ctx, grad_output):
        y, = ctx.saved_arrays
        return grad_output * y * (1.0 - y)


class Softplus(Function):

    @staticmethod
    def forward(ctx, x):
        ctx.save_for_backward(x)
        return np.logaddexp(0.0, x)

    @staticmethod
    def backward(ctx, grad_output):
        x, = ctx.saved_arrays
        return grad_output * expit(x)


class Log(Function):

    @staticmethod
    def forward(ctx, x):
        if np.any(x <= 0):
            raise NonFiniteError("log of a non-positive value")
        ctx.save_for_backward(x)
        return np.log(x)

    @staticmethod
    def backward(ctx, grad_output):
        x, = ctx.saved_arrays
        return grad_output / x


class Clip(Function):

    @staticmethod
    def forward(ctx, x, lo=-np.inf, hi=np.inf):
        ctx.save_for_backward((x >= lo) & (x <= hi))
        return np.clip(x, lo, hi)

    @staticmethod
    def backward(ctx, grad_output):
        inside, = ctx.saved_arrays
        return grad_output * inside


class LogSigmoid(Function):
    """log sigmoid(x), with the value clamped to [lo, hi] and the gradient 1 - sigmoid(x) everywhere.

    The clamp bounds the value only, a saturated logit keeps its gradient.
    """

    @staticmethod
    def forward(ctx, x, lo=-np.inf, hi=0.0):
        ctx.save_for_backward(x)
        return np.clip(-np.logaddexp(0.0, -x), lo, hi)

    @staticmethod
    def backward(ctx, grad_output):
        x, = ctx.saved_arrays
        return grad_output * expit(-x)


class Mean(Function):

    @staticmethod
    def forward(ctx, x):
        ctx.shape = x.shape
        return np.mean(x)

    @staticmethod
    def backward(ctx, grad_output):
        return np.full(ctx.shape, float(grad_output) / int(np.prod(ctx.shape)))


def blocked_rows(mask):
    """Rows of an additive mask with every position blocked."""
    mask = np.asarray(mask, dtype=np.float64)
    return np.all(mask <= BLOCKED / 2, axis=-1)


class MaskedAdd(Function):
    """x + mask, with fully blocked rows replaced by zeros.

    A zero row softmaxes to the uniform distribution and passes no gradient.
    """

    @staticmethod
    def forward(ctx, x, mask=None):
        mask = np.asarray(mask, dtype=np.float64)
        _same_shape('masked_add', x, mask)
        blocked = blocked_rows(mask)
        ctx.save_for_backward(blocked)
        out = x + mask
        out[blocked] = 0.0
        return out

    @staticmethod
    def backward(ctx, grad_output):
        blocked, = ctx.saved_arrays
        grad = grad_output.copy()
        grad[blocked] = 0.0
        return grad


class Reshape(Function):

    @staticmethod
    def forward(ctx, x, shape=None):
        ctx.shape = x.shape
        try:
            return x.reshape(shape)
        except ValueError as e:
            raise ShapeError("reshape: {}".format(e))

    @staticmethod
    def backward(ctx, grad_output):
        return grad_output.reshape(ctx.shape)


class Patchify(Function):
    """(C, H, W) to (H/p * W/p, C*p*p), patches row-major, features ordered (c, dy, dx)."""

    @staticmethod
    def forward(ctx, x, patch=1):
        if x.ndim != 3 or x.shape[1] % patch or x.shape[2] % patch:
            raise ShapeError("patchify: shape {} does not tile by {}".format(x.shape, patch))
        c, h, w = x.shape
        ctx.shape = x.shape
        ctx.patch = patch
        return (x.reshape(c, h // patch, patch, w // patch, patch)
                .transpose(1, 3, 0, 2, 4)
                .reshape((h // patch) * (w // patch), c * patch * patch))

    @staticmethod
    def backward(ctx, grad_output):
        c, h, w = ctx.shape
        p = ctx.patch
        return (grad_output.reshape(h // p, w // p, c, p, p)
                .transpose(2, 0, 3, 1, 4)
                .reshape(c, h, w))


class RowSlice(Function):

    @staticmethod
    def forward(ctx, x, start=0, stop=None):
        if x.ndim != 2:
            raise ShapeError("row_slice expects a matrix, got shape {}".format(x.shape))
        ctx.shape = x.shape
        ctx.rows = slice(start, stop)
        return x[ctx.rows]

    @staticmethod
    def backward(ctx, grad_output):
        grad = np.zeros(ctx.shape)
        grad[ctx.rows] = grad_output
        return grad


class ConcatRows(Function):

    @staticmethod
    def forward(ctx, *arrays):
        if any(a.ndim != 2 or a.shape[1] != arrays[0].shape[1] for a in arrays):
            raise ShapeError("concat_rows: shapes {} do not share a column count"
                             .format([a.shape for a in arrays]))
        ctx.splits = np.cumsum([a.shape[0] for a in arrays])[:-1]
        return np.concatenate(arrays, axis=0)

    @staticmethod
    def backward(ctx, grad_output):
        return tuple(np.split(grad_output, ctx.splits, axis=0))


def add(a, b):
    return Add.apply(a, b)


def sub(a, b):
    return Sub.apply(a, b)


def mul(a, b):
    return Mul.apply(a, b)


def scale(x, factor):
    return Scale.apply(x, factor=factor)


def matmul(a, b):
    return MatMul.apply(a, b)


def transpose(x):
    return Transpose.apply(x)


def softmax(x):
    return Softmax.apply(x)


def sigmoid(x):
    return Sigmoid.apply(x)


def softplus(x):
    return Softplus.apply(x)


def log(x):
    return Log.apply(x)


def clip(x, lo, hi):
    return Clip.apply(x, lo=lo, hi=hi)


def log_sigmoid(x, lo=-np.inf, hi=0.0):
    return LogSigmoid.apply(x, lo=lo, hi=hi)


def mean(x):
    return Mean.apply(x)


def masked_add(x, mask):
    return MaskedAdd.apply(x, mask=mask)


def reshape(x, shape):
    return Reshape.apply(x, shape=tuple(shape))


def patchify(x, patch):
    return Patchify.apply(x, patch=int(patch))


def row_slice(x, start, stop):
    return RowSlice.apply(x, start=start, stop=stop)


def concat_rows(*values):
    return ConcatRows.apply(*values)
