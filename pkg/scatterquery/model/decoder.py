"""Scattering query decoder.

Each layer refines the query bank W with masked cross attention over the
encoder tokens,

    W_l = softmax(M_{l-1} + Q_l K_l^T) V_l + W_{l-1},

followed by a residual self-attention sub-layer over the queries. M_{l-1}
opens the positions where the previous layer's coefficient map of a query,
sigmoid(W t / sqrt(d)) as in the heads, reaches the threshold. Layer 0 is fully open.
"""
from __future__ import absolute_import

import logging
from typing import List, NamedTuple

import numpy as np
from scipy.special import expit

from ..autodiff import BLOCKED, add, blocked_rows, masked_add, matmul, softmax, transpose
from ..polsar.bases import YAMAGUCHI_KINDS
from ..queries import query_bank, shipped_queries

logger = logging.getLogger("scatterquery.model")

NUM_YAMAGUCHI = len(YAMAGUCHI_KINDS)
NUM_DECOMPOSITION = 10
NUM_QUERIES = NUM_YAMAGUCHI + NUM_DECOMPOSITION


class DecoderOutput(NamedTuple):
    queries: object
    masks: List[np.ndarray]
    blocked_rows: int


def logit_scale(dim):
    return 1.0 / np.sqrt(dim)


def open_mask(num_queries, num_tokens):
    return np.zeros((num_queries, num_tokens))


def update_mask(coefficients, threshold=0.5):
    """0 where coefficient >= threshold, BLOCKED elsewhere."""
    return np.where(np.asarray(coefficients) >= threshold, 0.0, BLOCKED)


def masked_attention_layer(queries, q, k, v, mask, log_blocked=True):
    """softmax(mask + q k^T) v + queries, rows fully blocked attend uniformly."""
    if mask.shape != (q.shape[0], k.shape[0]):
        raise ValueError("mask shape {} does not match {} queries x {} keys"
                         .format(mask.shape, q.shape[0], k.shape[0]))
    if log_blocked:
        n_blocked = int(blocked_rows(mask).sum())
        if n_blocked:
            logger.warning("{} of {} attention rows fully blocked, attending uniformly"
                           .format(n_blocked, mask.shape[0]))
    attention = softmax(masked_add(matmul(q, transpose(k)), mask))
    return add(matmul(attention, v), queries)


def self_attention_layer(queries, q, k, v):
    return add(matmul(softmax(matmul(q, transpose(k))), v), queries)


def init_decoder(rng, dim, num_layers, query_seed=20240607, num_samples=64, bank_seed=0):
    """Decoder weights, with the query banks initialized from the scattering queries.

    Rows 0-3 are the Yamaguchi bank (surface, double, volume, helix) and rows
    4-13 the decomposition bank in kind order.
    """
    queries = shipped_queries(m=num_samples, seed=query_seed)
    yamaguchi = query_bank([queries[int(kind)] for kind in YAMAGUCHI_KINDS], dim, (bank_seed, 0))
    decomposition = query_bank(queries, dim, (bank_seed, 1))
    params = {'decoder.queries': np.concatenate([yamaguchi, decomposition], axis=0)}
    for layer in range(num_layers):
        prefix = 'decoder.layer{}.'.format(layer)
        params[prefix + 'wq'] = rng.standard_normal((dim, dim)) / np.sqrt(dim)
        params[prefix + 'wk'] = rng.standard_normal((dim, dim)) / np.sqrt(dim)
        params[prefix + 'wv'] = rng.standard_normal((dim, dim)) / dim
        params[prefix + 'self_q'] = rng.standard_normal((dim, dim)) / np.sqrt(dim)
        params[prefix + 'self_k'] = rng.standard_normal((dim, dim)) / np.sqrt(dim)
        params[prefix + 'self_v'] = rng.standard_normal((dim, dim)) / dim
    return params


def decode(params, tokens, num_layers, threshold=0.5, fixed_masks=None):
    """Run the decoder over (N', d) tokens.

    ``fixed_masks`` replaces the mask of every layer, which keeps the graph
    piecewise smooth for finite-difference checks.
    """
    w = params['decoder.queries']
    num_tokens = tokens.shape[0]
    if fixed_masks is not None and len(fixed_masks) != num_layers:
        raise ValueError("need {} fixed masks, got {}".format(num_layers, len(fixed_masks)))
    mask = open_mask(w.shape[0], num_tokens)
    masks, n_blocked = [], 0
    for layer in range(num_layers):
        prefix = 'decoder.layer{}.'.format(layer)
        if fixed_masks is not None:
            mask = np.asarray(fixed_masks[layer], dtype=np.float64)
        masks.append(mask)
        n_blocked += int(blocked_rows(mask).sum())
        w = masked_attention_layer(w, matmul(w, params[prefix + 'wq']), matmul(tokens, params[prefix + 'wk']),
                                   matmul(tokens, params[prefix + 'wv']), mask, log_blocked=False)
        w = self_attention_layer(w, matmul(w, params[prefix + 'self_q']), matmul(w, params[prefix + 'self_k']),
                                 matmul(w, params[prefix + 'self_v']))
        if fixed_masks is None and layer + 1 < num_layers:
            mask = update_mask(expit(logit_scale(tokens.shape[1]) * (w.data @ tokens.data.T)), threshold)
    if n_blocked:
        logger.warning("{} fully blocked attention rows over {} layers, attending uniformly"
                       .format(n_blocked, num_layers))
    return DecoderOutput(w, masks, n_blocked)
