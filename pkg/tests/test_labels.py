import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from numpy.testing import assert_allclose, assert_array_equal
from scipy import stats

from scatterquery.datasets import layout_region_map, scene_labels, synthesize_scene
from scatterquery.labels import (MEDIAN_FACTOR, BinaryLabelStack, RayleighFitError, binarize_component,
                                 fit_rayleigh, generate_labels, label_statistics, median_threshold, quartile)
from scatterquery.labels.rayleigh import RayleighFit, rayleigh_cdf, rayleigh_pdf
from scatterquery.polsar import ComponentStack, ScatteringKind, TenPowers


def rayleigh_draws(mu, n, seed=0):
    return stats.rayleigh.rvs(scale=mu, size=n, random_state=np.random.default_rng(seed))


class TestRayleighFit:

    def test_closed_form(self):
        assert fit_rayleigh([1, 1, 1, 1]).mu == pytest.approx(0.70711, abs=1e-5)

    def test_million_draws(self):
        x = rayleigh_draws(2.0, 10 ** 6)
        fit = fit_rayleigh(x)
        assert abs(fit.mu - 2.0) <= 0.01 * 2.0
        theta = median_threshold(fit)
        assert abs(theta - fit.mu * math.sqrt(2 * math.log(2))) <= 1e-12
        assert 0.49 <= binarize_component(x, theta).mean() <= 0.51

    def test_single_sample_raises(self):
        with pytest.raises(RayleighFitError):
            fit_rayleigh([3.0])

    def test_negative_samples_raise(self):
        with pytest.raises(RayleighFitError):
            fit_rayleigh([1.0, -1.0, 2.0])

    def test_zeros_dropped(self):
        fit = fit_rayleigh([0.0, 0.0, 1.0, 1.0])
        assert fit.n == 2
        assert fit.n_dropped == 2
        assert fit.mu == pytest.approx(math.sqrt(0.5))

    def test_quartiles(self):
        fit = fit_rayleigh(rayleigh_draws(1.5, 1000))
        q1, q2, q3 = fit.quartiles
        assert q1 < q2 < q3
        for p, q in zip((0.25, 0.5, 0.75), fit.quartiles):
            assert abs(q - fit.mu * math.sqrt(-2 * math.log(1 - p))) <= 1e-12
            assert rayleigh_cdf(q, fit.mu) == pytest.approx(p)

    def test_quartile_function(self):
        assert quartile(1.0, 0.5) == pytest.approx(MEDIAN_FACTOR, abs=1e-12)

    def test_pdf_closed_form(self):
        x = np.linspace(0.0, 6.0, 13)
        expected = x / 4.0 * np.exp(-x ** 2 / 8.0)
        assert_allclose(rayleigh_pdf(x, 2.0), expected, rtol=1e-12)


class TestThreshold:

    @pytest.mark.parametrize('mu, expected', [(1.0, 1.17741), (2.0, 2.35482)])
    def test_median(self, mu, expected):
        assert median_threshold(RayleighFit(mu, (0.0, 0.0, 0.0), 2)) == pytest.approx(expected, abs=1e-5)

    def test_binarize_examples(self):
        assert_array_equal(binarize_component(np.zeros((2, 2)), 1.0), np.zeros((2, 2)))
        assert binarize_component(np.array([1.5]), 1.5)[0] == 1

    def test_binarize_matches_loop(self, rng):
        values = rng.uniform(0, 2, size=(5, 7))
        mask = binarize_component(values, 1.0)
        for i in range(5):
            for j in range(7):
                assert mask[i, j] == (0 if values[i, j] < 1.0 else 1)

    def test_rejects_non_positive_threshold(self):
        with pytest.raises(ValueError):
            binarize_component(np.ones(3), 0.0)

    @settings(deadline=None, max_examples=30)
    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, c):
        x = rayleigh_draws(1.0, 2000, seed=4)
        mask = binarize_component(x, median_threshold(fit_rayleigh(x)))
        scaled = binarize_component(c * x, median_threshold(fit_rayleigh(c * x)))
        # values within rounding of the threshold may land on either side
        theta = median_threshold(fit_rayleigh(x))
        stable = np.abs(x - theta) > 1e-9 * theta
        assert_array_equal(mask[stable], scaled[stable])


class TestGenerateLabels:

    def test_constant_component_is_all_one(self):
        c = 3.0
        fit = fit_rayleigh(np.full(16, c))
        assert fit.mu == pytest.approx(c / math.sqrt(2))
        assert c >= median_threshold(fit)
        powers = np.stack([np.full((4, 4), c), np.full((4, 4), 1.0), np.full((4, 4), 2.0), np.full((4, 4), 0.5)])
        labels = generate_labels(ComponentStack(powers))
        assert_array_equal(labels.masks, np.ones((4, 4, 4)))

    def test_degenerate_component(self, caplog):
        powers = np.stack([np.full((3, 3), 1.0), np.zeros((3, 3)), np.full((3, 3), 2.0), np.full((3, 3), 0.5)])
        with caplog.at_level(logging.WARNING, logger="scatterquery.labels"):
            labels = generate_labels(ComponentStack(powers))
        assert labels.degenerate == (False, True, False, False)
        assert_array_equal(labels.masks[1], np.zeros((3, 3)))
        assert labels.fits[1] is None
        assert 'degenerate' in caplog.text
        assert labels.sidecar()['components'][1]['threshold'] is None

    def test_two_region_scene(self):
        region_map = layout_region_map('halves', 32, 32)
        raster = synthesize_scene({0: TenPowers.from_mapping({ScatteringKind.SURFACE: 10.0}),
                                   1: TenPowers.from_mapping({ScatteringKind.SURFACE: 1.0})},
                                  region_map, seed=0, speckle=False)
        _, labels = scene_labels(raster, 3)
        agreement = np.mean(labels.masks[0] == (region_map == 0))
        assert agreement >= 0.99

    def test_planes_round_trip(self, rng):
        powers = rng.uniform(0.1, 2.0, size=(4, 6, 6))
        labels = generate_labels(ComponentStack(powers))
        planes = labels.to_planes()
        assert set(np.unique(planes)) <= {0, 255}
        back = BinaryLabelStack.from_planes(planes, labels.sidecar())
        assert_array_equal(back.masks, labels.masks)
        assert back.thresholds == labels.thresholds

    def test_statistics(self, rng):
        labels = generate_labels(ComponentStack(rng.uniform(0.1, 2.0, size=(4, 8, 8))))
        stats_ = label_statistics(labels)
        assert set(stats_) == {'surface', 'double', 'volume', 'helix'}
        assert all(0.0 <= v <= 1.0 for v in stats_.values())
