import logging
from collections import OrderedDict

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from scatterquery.autodiff import BLOCKED, Tape, grad_check, mean
from scatterquery.config import get_cfg_defaults
from scatterquery.datasets import TrainingSample
from scatterquery.loss import make_loss
from scatterquery.model import (NUM_QUERIES, EncoderInputError, ScatteringQueryModel, create, encode,
                                encoder_tokens, make_model, masked_attention_layer, names, predict_heads,
                                update_mask)
from scatterquery.model.encoder import init_encoder


def constants(tape, arrays):
    return OrderedDict((name, tape.constant(value)) for name, value in arrays.items())


def attention_loop(w, q, k, v, mask):
    """softmax(mask + q k^T) v + w, one query and one key at a time."""
    out = np.zeros_like(w)
    for i in range(q.shape[0]):
        if all(mask[i, j] <= BLOCKED / 2 for j in range(k.shape[0])):
            weights = [1.0 / k.shape[0]] * k.shape[0]
        else:
            logits = [mask[i, j] + sum(q[i, c] * k[j, c] for c in range(q.shape[1])) for j in range(k.shape[0])]
            top = max(logits)
            exps = [np.exp(x - top) for x in logits]
            weights = [e / sum(exps) for e in exps]
        for j in range(k.shape[0]):
            out[i] += weights[j] * v[j]
        out[i] += w[i]
    return out


def run_attention(w, q, k, v, mask, log_blocked=True):
    tape = Tape()
    args = [tape.constant(a) for a in (w, q, k, v)]
    return masked_attention_layer(*args, mask, log_blocked=log_blocked).data


class TestEncoder:

    def setup_method(self):
        self.params = init_encoder(np.random.default_rng(0), dim=8, patch=2, num_layers=2)

    def test_zero_input(self):
        tape = Tape()
        features = encode(constants(tape, self.params), tape.constant(np.zeros((8, 4, 4))), 2, 2)
        assert features.shape == (8, 2, 2)
        assert_array_equal(features.data, np.zeros((8, 2, 2)))

    def test_identical_patches(self, rng):
        patch = rng.standard_normal((8, 2, 2))
        tape = Tape()
        tokens = encoder_tokens(constants(tape, self.params), tape.constant(np.tile(patch, (1, 3, 2))), 2, 2)
        for row in tokens.data[1:]:
            assert_allclose(row, tokens.data[0], rtol=1e-12, atol=1e-15)

    def test_input_errors(self):
        tape = Tape()
        with pytest.raises(EncoderInputError):
            encoder_tokens(constants(tape, self.params), tape.constant(np.zeros((4, 4, 4))), 2, 2)
        with pytest.raises(EncoderInputError):
            encoder_tokens(constants(tape, self.params), tape.constant(np.zeros((8, 5, 4))), 2, 2)

    def test_gradient_wrt_input(self, rng):
        params = self.params

        def f(tape, v):
            return mean(encode(constants(tape, params), v['x'], 2, 2))

        assert grad_check(f, {'x': rng.standard_normal((8, 4, 4))}) < 1e-4


class TestMaskedAttention:

    def test_matches_loop(self, rng):
        w, q = rng.standard_normal((5, 4)), rng.standard_normal((5, 4))
        k, v = rng.standard_normal((7, 4)), rng.standard_normal((7, 4))
        mask = np.where(rng.uniform(size=(5, 7)) < 0.4, BLOCKED, 0.0)
        mask[2] = BLOCKED
        mask[3] = 0.0
        assert np.max(np.abs(run_attention(w, q, k, v, mask) - attention_loop(w, q, k, v, mask))) <= 1e-12

    def test_open_mask_is_plain_attention(self, rng):
        w, q = rng.standard_normal((3, 4)), rng.standard_normal((3, 4))
        k, v = rng.standard_normal((6, 4)), rng.standard_normal((6, 4))
        logits = q @ k.T
        e = np.exp(logits - logits.max(axis=1, keepdims=True))
        expected = (e / e.sum(axis=1, keepdims=True)) @ v + w
        assert_allclose(run_attention(w, q, k, v, np.zeros((3, 6))), expected, rtol=1e-13)

    def test_single_key(self, rng):
        w, q = rng.standard_normal((3, 4)), rng.standard_normal((3, 4))
        k, v = rng.standard_normal((1, 4)), rng.standard_normal((1, 4))
        assert_allclose(run_attention(w, q, k, v, np.zeros((3, 1))), v + w, atol=1e-15)

    def test_equal_keys(self, rng):
        w, q = rng.standard_normal((3, 4)), rng.standard_normal((3, 4))
        k = np.tile(rng.standard_normal((1, 4)), (2, 1))
        v = rng.standard_normal((2, 4))
        assert_allclose(run_attention(w, q, k, v, np.zeros((3, 2))), v.mean(axis=0) + w, atol=1e-15)

    def test_blocked_row_warns(self, rng, caplog):
        w, q = rng.standard_normal((2, 4)), rng.standard_normal((2, 4))
        k, v = rng.standard_normal((3, 4)), rng.standard_normal((3, 4))
        with caplog.at_level(logging.WARNING, logger="scatterquery.model"):
            out = run_attention(w, q, k, v, update_mask(np.zeros((2, 3))))
        assert 'fully blocked' in caplog.text
        assert_allclose(out, v.mean(axis=0) + w, atol=1e-15)

    def test_mask_shape(self, rng):
        with pytest.raises(ValueError):
            run_attention(*(rng.standard_normal((2, 4)) for _ in range(4)), np.zeros((3, 2)))


class TestUpdateMask:

    def test_all_open(self):
        assert_array_equal(update_mask(np.ones((4, 5))), np.zeros((4, 5)))

    def test_all_blocked(self):
        assert_array_equal(update_mask(np.zeros((4, 5))), np.full((4, 5), BLOCKED))

    def test_matches_loop(self, rng):
        coeffs = rng.uniform(size=(6, 9))
        coeffs[0, 0] = 0.5
        mask = update_mask(coeffs, 0.5)
        for i in range(6):
            for j in range(9):
                assert mask[i, j] == (0.0 if coeffs[i, j] >= 0.5 else BLOCKED)


class TestHeads:

    def test_zero_logits(self):
        tape = Tape()
        heads = predict_heads(tape.constant(np.zeros((NUM_QUERIES, 8))), tape.constant(np.ones((6, 8))))
        assert_array_equal(heads.yamaguchi.data, np.full((4, 6), 0.5))
        assert_allclose(heads.decomposition.data, np.full((10, 6), np.log(2)), rtol=1e-15)

    def test_dot_products_match_loop(self, rng):
        queries, tokens = rng.standard_normal((NUM_QUERIES, 5)), rng.standard_normal((7, 5))
        tape = Tape()
        heads = predict_heads(tape.constant(queries), tape.constant(tokens))
        for i in range(NUM_QUERIES):
            for j in range(7):
                logit = sum(queries[i, c] * tokens[j, c] for c in range(5)) / np.sqrt(5)
                if i < 4:
                    assert abs(heads.yamaguchi.data[i, j] - 1 / (1 + np.exp(-logit))) <= 1e-12
                    assert abs(heads.yamaguchi_logits.data[i, j] - logit) <= 1e-12
                else:
                    assert abs(heads.decomposition.data[i - 4, j] - np.log1p(np.exp(logit))) <= 1e-12


class TestModel:

    def test_factory(self, tiny_cfg):
        assert names() == ['scattering_query']
        model = make_model(tiny_cfg)
        assert model.dim == 8
        with pytest.raises(KeyError):
            create('swin', tiny_cfg)

    def test_rejects_small_dim(self):
        with pytest.raises(ValueError):
            ScatteringQueryModel(dim=4)

    def test_predict_shapes(self, tiny_cfg, rng):
        model = make_model(tiny_cfg)
        yamaguchi, decomposition = model.predict(rng.standard_normal((8, 16, 16)))
        assert yamaguchi.shape == (4, 4, 4)
        assert decomposition.shape == (10, 4, 4)
        assert np.all((yamaguchi > 0) & (yamaguchi < 1))
        assert np.all(decomposition > 0)

    def test_demo_width_maps_stay_inside_unit_interval(self, cfg, rng):
        cfg.merge_from_list(['QUERIES.NUM_SAMPLES', 8])
        yamaguchi, _ = make_model(cfg).predict(rng.standard_normal((8, 32, 32)))
        assert np.all((yamaguchi > 0) & (yamaguchi < 1))

    def test_same_seed_same_parameters(self, tiny_cfg):
        a, b = make_model(tiny_cfg).state_dict(), make_model(tiny_cfg).state_dict()
        assert list(a) == list(b)
        for name in a:
            assert_array_equal(a[name], b[name])

    def test_query_bank_rows_are_unit(self, tiny_cfg):
        queries = make_model(tiny_cfg).state_dict()['decoder.queries']
        assert queries.shape == (NUM_QUERIES, 8)
        assert_allclose(np.linalg.norm(queries, axis=1), 1.0)

    def test_load_state_dict(self, tiny_cfg):
        model = make_model(tiny_cfg)
        state = OrderedDict((name, value + 1.0) for name, value in model.state_dict().items())
        model.load_state_dict(state)
        assert_array_equal(model.state_dict()['encoder.embed'], state['encoder.embed'])
        state.pop('encoder.embed')
        with pytest.raises(KeyError):
            model.load_state_dict(state)

    def test_end_to_end_gradient(self, rng):
        model = ScatteringQueryModel(dim=8, patch_size=4, encoder_layers=1, decoder_layers=2, num_samples=4)
        inputs = rng.standard_normal((8, 8, 8))
        sample = TrainingSample('scene', inputs, rng.integers(0, 2, size=(4, 2, 2)).astype(np.float64),
                                rng.uniform(0.5, 1.5, size=(2, 2)), 1.0)
        loss_fn = make_loss(get_cfg_defaults())
        masks = [np.zeros((NUM_QUERIES, 4)), np.zeros((NUM_QUERIES, 4))]

        def f(tape, params):
            output = model.forward(params, tape.constant(inputs), fixed_masks=masks)
            return loss_fn(tape, output.heads, sample).total

        assert grad_check(f, model.state_dict(), max_elements=6, seed=3) < 1e-4

    def test_decode_warns_on_blocked_rows(self, rng, caplog):
        model = ScatteringQueryModel(dim=8, patch_size=4, encoder_layers=1, decoder_layers=2, num_samples=4)
        masks = [np.zeros((NUM_QUERIES, 4)), np.full((NUM_QUERIES, 4), BLOCKED)]
        tape = Tape()
        params = constants(tape, model.state_dict())
        with caplog.at_level(logging.WARNING, logger="scatterquery.model"):
            output = model.forward(params, tape.constant(rng.standard_normal((8, 8, 8))), fixed_masks=masks)
        assert output.decoder.blocked_rows == NUM_QUERIES
        assert any(r.levelno == logging.WARNING and 'fully blocked' in r.getMessage() for r in caplog.records)
