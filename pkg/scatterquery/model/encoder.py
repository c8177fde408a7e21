"""Strided patch encoder.

A bias-free patch embedding maps every p x p patch of the 8-channel input to
a d-dim token, followed by residual SiLU layers ``h + z * sigmoid(z)`` with
``z = h W``. Zero input therefore yields zero features.
"""
from __future__ import absolute_import

import numpy as np

from ..autodiff import add, matmul, mul, patchify, reshape, sigmoid, transpose

IN_CHANNELS = 8


class EncoderInputError(ValueError):
    pass


def check_encoder_input(shape, patch):
    if len(shape) != 3 or shape[0] != IN_CHANNELS:
        raise EncoderInputError("encoder expects {} channels as (C, H, W), got shape {}"
                                .format(IN_CHANNELS, tuple(shape)))
    if shape[1] % patch or shape[2] % patch:
        raise EncoderInputError("patch size {} does not divide input extent {}x{}"
                                .format(patch, shape[1], shape[2]))


def init_encoder(rng, dim, patch, num_layers, gain=1.0):
    """Encoder weights for inputs of unit mean power."""
    fan_in = IN_CHANNELS * patch * patch
    params = {'encoder.embed': rng.standard_normal((fan_in, dim)) * gain * np.sqrt(IN_CHANNELS / fan_in)}
    for layer in range(num_layers):
        params['encoder.layer{}'.format(layer)] = rng.standard_normal((dim, dim)) * 0.5 / np.sqrt(dim)
    return params


def encoder_tokens(params, x, patch, num_layers):
    """(H'*W', d) token matrix of a (8, H, W) input."""
    check_encoder_input(x.shape, patch)
    h = matmul(patchify(x, patch), params['encoder.embed'])
    for layer in range(num_layers):
        z = matmul(h, params['encoder.layer{}'.format(layer)])
        h = add(h, mul(z, sigmoid(z)))
    return h


def encode(params, x, patch, num_layers):
    """d x H' x W' feature map."""
    tokens = encoder_tokens(params, x, patch, num_layers)
    return reshape(transpose(tokens), (tokens.shape[1], x.shape[1] // patch, x.shape[2] // patch))
