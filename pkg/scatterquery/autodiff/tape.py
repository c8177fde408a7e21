"""Reverse-mode tape.

Every forward op appends one record (function, ctx, input ids, output id) to
the tape, so records are already in topological order and ``backward`` only
has to walk them in reverse. Gradients accumulate per node id.
"""
from __future__ import absolute_import

from collections import OrderedDict
from typing import NamedTuple, Tuple

import numpy as np


class ShapeError(ValueError):
    pass


class TapeError(RuntimeError):
    pass


class NonFiniteError(FloatingPointError):
    pass


class Context(object):
    """Scratch space an op fills in forward and reads in backward."""

    def __init__(self):
        self.saved_arrays = ()

    def save_for_backward(self, *arrays):
        self.saved_arrays = arrays


class Record(NamedTuple):
    function: type
    ctx: Context
    inputs: Tuple[int, ...]
    output: int


def _frozen(data):
    array = np.array(data, dtype=np.float64)
    array.setflags(write=False)
    return array


class Tape(object):

    def __init__(self):
        self._values = []
        self._requires_grad = []
        self._records = []
        self._leaves = OrderedDict()
        self._grads = None

    def __len__(self):
        return len(self._records)

    @property
    def records(self):
        return tuple(self._records)

    def _push(self, data, requires_grad):
        data = _frozen(data)
        if not np.all(np.isfinite(data)):
            raise NonFiniteError("tape values must be finite")
        self._values.append(data)
        self._requires_grad.append(bool(requires_grad))
        return DiffValue(self, len(self._values) - 1)

    def leaf(self, data, name=None, requires_grad=True):
        value = self._push(data, requires_grad)
        if requires_grad:
            name = 'leaf{}'.format(value.node_id) if name is None else name
            if name in self._leaves:
                raise TapeError("duplicate leaf name '{}'".format(name))
            self._leaves[name] = value.node_id
        return value

    def constant(self, data):
        return self.leaf(data, requires_grad=False)

    def value(self, node_id):
        return self._values[node_id]

    def requires_grad(self, node_id):
        return self._requires_grad[node_id]

    def record(self, function, ctx, inputs, output):
        for value in inputs:
            if value.tape is not self:
                raise TapeError("{} mixes values from different tapes".format(function.__name__))
        requires_grad = any(self._requires_grad[v.node_id] for v in inputs)
        value = self._push(output, requires_grad)
        self._records.append(Record(function, ctx, tuple(v.node_id for v in inputs), value.node_id))
        return value

    def reset(self):
        """Forget gradients so ``backward`` may run again."""
        self._grads = None

    def backward(self, loss):
        """Gradients of a scalar loss for every named leaf, as an OrderedDict."""
        if loss.tape is not self:
            raise TapeError("loss belongs to another tape")
        if self._grads is not None:
            raise TapeError("backward already ran on this tape, call reset() first")
        if loss.size != 1:
            raise ShapeError("loss must be scalar, got shape {}".format(loss.shape))
        grads = {loss.node_id: np.ones_like(loss.data)}
        for record in reversed(self._records):
            grad_output = grads.get(record.output)
            if grad_output is None or not self._requires_grad[record.output]:
                continue
            grad_inputs = record.function.backward(record.ctx, grad_output)
            if not isinstance(grad_inputs, tuple):
                grad_inputs = (grad_inputs,)
            for node_id, grad in zip(record.inputs, grad_inputs):
                if grad is None or not self._requires_grad[node_id]:
                    continue
                if grad.shape != self._values[node_id].shape:
                    raise ShapeError("{} returned a gradient of shape {} for an input of shape {}"
                                     .format(record.function.__name__, grad.shape, self._values[node_id].shape))
                grads[node_id] = grads[node_id] + grad if node_id in grads else grad
        self._grads = grads
        return OrderedDict((name, self.grad(node_id)) for name, node_id in self._leaves.items())

    def grad(self, node_id):
        if self._grads is None:
            raise TapeError("no gradients yet, run backward() first")
        grad = self._grads.get(node_id)
        return np.zeros_like(self._values[node_id]) if grad is None else grad


class DiffValue(object):
    """Handle to one node of a Tape."""

    __slots__ = ('tape', 'node_id')

    def __init__(self, tape, node_id):
        self.tape = tape
        self.node_id = node_id

    def __repr__(self):
        return 'DiffValue(node={}, shape={})'.format(self.node_id, self.shape)

    @property
    def data(self):
        return self.tape.value(self.node_id)

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def grad(self):
        return self.tape.grad(self.node_id)

    def item(self):
        return self.data.item()

    def __add__(self, other):
        from .functions import add
        return add(self, other)

    def __sub__(self, other):
        from .functions import sub
        return sub(self, other)

    def __mul__(self, other):
        from .functions import mul, scale
        if isinstance(other, (int, float)):
            return scale(self, other)
        return mul(self, other)

    __rmul__ = __mul__

    def __matmul__(self, other):
        from .functions import matmul
        return matmul(self, other)

    @property
    def T(self):
        from .functions import transpose
        return transpose(self)
