from __future__ import absolute_import

from .tape import Context, DiffValue, NonFiniteError, ShapeError, Tape, TapeError
from .functions import (BLOCKED, Function, add, blocked_rows, clip, concat_rows, log, log_sigmoid, masked_add,
                        matmul, mean, mul, patchify, reshape, row_slice, scale, sigmoid, softmax, softplus, sub,
                        transpose)
from .gradcheck import grad_check
