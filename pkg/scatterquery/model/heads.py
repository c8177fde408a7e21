from __future__ import absolute_import

from typing import NamedTuple

from ..autodiff import matmul, row_slice, scale, sigmoid, softplus, transpose
from .decoder import NUM_QUERIES, NUM_YAMAGUCHI, logit_scale


class HeadOutput(NamedTuple):
    """Coefficient maps flattened row-major over the feature grid.

    yamaguchi is (4, H'*W') in (0, 1), decomposition is (10, H'*W') and positive.
    yamaguchi_logits are the pre-sigmoid values the cross entropy is taken from.
    """

    yamaguchi: object
    decomposition: object
    yamaguchi_logits: object = None


def head_logits(queries, tokens):
    """Query-token dot products over sqrt(d), shape (14, H'*W')."""
    return scale(matmul(queries, transpose(tokens)), logit_scale(tokens.shape[1]))


def predict_heads(queries, tokens):
    """Scaled dot products through a sigmoid (Yamaguchi bank) or softplus (decomposition bank)."""
    logits = head_logits(queries, tokens)
    yamaguchi_logits = row_slice(logits, 0, NUM_YAMAGUCHI)
    return HeadOutput(sigmoid(yamaguchi_logits),
                      softplus(row_slice(logits, NUM_YAMAGUCHI, NUM_QUERIES)),
                      yamaguchi_logits)
