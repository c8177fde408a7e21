from __future__ import absolute_import

import logging
from collections import OrderedDict
from typing import NamedTuple

import numpy as np

from ..autodiff import Tape
from ..utils.serialization import load_checkpoint
from .decoder import NUM_QUERIES, DecoderOutput, decode, init_decoder
from .encoder import encoder_tokens, init_encoder
from .heads import HeadOutput, predict_heads

logger = logging.getLogger("scatterquery.model")


class ModelOutput(NamedTuple):
    tokens: object
    decoder: DecoderOutput
    heads: HeadOutput


class ScatteringQueryModel(object):
    """Patch encoder, scattering query decoder and coefficient heads.

    Parameters live in ``state_dict`` as plain arrays. Every forward pass binds
    them as leaves of a fresh Tape, so the optimizer only sees arrays.
    """

    def __init__(self, dim=64, patch_size=4, encoder_layers=2, decoder_layers=3, mask_threshold=0.5,
                 init_gain=1.0, seed=0, query_seed=20240607, num_samples=64):
        if dim < 8:
            raise ValueError("feature dim must be at least 8, got {}".format(dim))
        self.dim = dim
        self.patch_size = patch_size
        self.encoder_layers = encoder_layers
        self.decoder_layers = decoder_layers
        self.mask_threshold = mask_threshold
        rng = np.random.default_rng(seed)
        params = init_encoder(rng, dim, patch_size, encoder_layers, init_gain)
        params.update(init_decoder(rng, dim, decoder_layers, query_seed, num_samples, bank_seed=seed))
        self._state = OrderedDict((name, np.asarray(params[name], dtype=np.float64)) for name in sorted(params))

    @classmethod
    def from_cfg(cls, cfg):
        return cls(dim=cfg.MODEL.DIM, patch_size=cfg.MODEL.PATCH_SIZE,
                   encoder_layers=cfg.MODEL.ENCODER_LAYERS, decoder_layers=cfg.MODEL.DECODER_LAYERS,
                   mask_threshold=cfg.MODEL.MASK_THRESHOLD, init_gain=cfg.MODEL.INIT_GAIN,
                   seed=cfg.SEED, query_seed=cfg.QUERIES.SEED, num_samples=cfg.QUERIES.NUM_SAMPLES)

    @property
    def num_parameters(self):
        return int(sum(value.size for value in self._state.values()))

    def state_dict(self):
        return self._state

    def load_state_dict(self, state):
        missing = sorted(set(self._state) - set(state))
        if missing:
            raise KeyError("state is missing parameters: {}".format(missing))
        for name, value in state.items():
            if name not in self._state:
                logger.warning("Ignoring unexpected parameter '{}'".format(name))
                continue
            if np.shape(value) != self._state[name].shape:
                raise ValueError("parameter '{}' has shape {}, expected {}"
                                 .format(name, np.shape(value), self._state[name].shape))
            self._state[name] = np.array(value, dtype=np.float64)

    def load_param(self, trained_path):
        state, meta = load_checkpoint(trained_path)
        self.load_state_dict(state)
        logger.info('Loading pretrained model from {}'.format(trained_path))
        return meta

    def bind(self, tape):
        return OrderedDict((name, tape.leaf(value, name=name)) for name, value in self._state.items())

    def forward(self, params, inputs, fixed_masks=None):
        """``inputs`` is a (8, H, W) DiffValue on the tape ``params`` are bound to."""
        tokens = encoder_tokens(params, inputs, self.patch_size, self.encoder_layers)
        decoded = decode(params, tokens, self.decoder_layers, self.mask_threshold, fixed_masks)
        return ModelOutput(tokens, decoded, predict_heads(decoded.queries, tokens))

    def predict(self, inputs):
        """(yamaguchi (4, H', W'), decomposition (10, H', W')) arrays without gradients."""
        tape = Tape()
        params = OrderedDict((name, tape.constant(value)) for name, value in self._state.items())
        output = self.forward(params, tape.constant(inputs))
        grid = (inputs.shape[1] // self.patch_size, inputs.shape[2] // self.patch_size)
        return (output.heads.yamaguchi.data.reshape((-1,) + grid),
                output.heads.decomposition.data.reshape((-1,) + grid))


def make_model(cfg):
    from . import create
    model = create(cfg.MODEL.NAME, cfg)
    logger.info("Built {} with {} parameters ({} queries, d={})"
                .format(cfg.MODEL.NAME, model.num_parameters, NUM_QUERIES, model.dim))
    return model
