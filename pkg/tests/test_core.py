import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from conftest import random_raster
from scatterquery.polsar import (CoherencyMatrix, PauliVector, PolsarRaster, RasterError, RasterMetadata,
                                 ScatteringMatrix, boxcar_coherency, pauli_vector, rank1_coherency, span_pixel,
                                 span_raster, symmetrize_reciprocal)

SQRT2 = math.sqrt(2.0)


def pixel(hh=0, hv=0, vh=0, vv=0):
    return ScatteringMatrix(hh, hv, vh, vv)


class TestSymmetrize:

    def test_averages_cross_pol(self):
        s = symmetrize_reciprocal(pixel(hv=1.0))
        assert s.s_hv == 0.5
        assert s.s_vh == 0.5

    def test_idempotent_on_symmetric_input(self):
        s = symmetrize_reciprocal(pixel(hh=1, hv=2 - 1j, vh=2 - 1j, vv=3j))
        assert s.s_hv == 2 - 1j
        assert s.s_vh == 2 - 1j
        assert s.s_vv == 3j

    def test_zero(self):
        s = symmetrize_reciprocal(pixel())
        assert_array_equal(s.to_array(), np.zeros(4))


class TestPauli:

    @pytest.mark.parametrize('s, expected', [
        (pixel(hh=1, vv=1), (SQRT2, 0, 0)),
        (pixel(hh=1, vv=-1), (0, SQRT2, 0)),
        (pixel(hv=1, vh=1), (0, 0, SQRT2)),
    ])
    def test_canonical_mechanisms(self, s, expected):
        k = pauli_vector(s)
        assert_allclose([k.k1, k.k2, k.k3], expected, atol=1e-15)

    def test_power_equals_span(self, rng):
        s = symmetrize_reciprocal(random_raster(rng, 8, 8).pixels)
        assert_allclose(pauli_vector(s).power, span_pixel(s), rtol=1e-12)


class TestRank1:

    def test_axis_vectors(self):
        t = rank1_coherency(PauliVector(SQRT2, 0, 0))
        assert_allclose(t.to_array(), np.diag([2.0, 0, 0]), atol=1e-15)
        t = rank1_coherency(PauliVector(0, 0, SQRT2))
        assert_allclose(t.to_array(), np.diag([0, 0, 2.0]), atol=1e-15)

    def test_outer_product(self):
        t = rank1_coherency(PauliVector(1, 1j, 0))
        assert t.t11 == 1
        assert t.t22 == 1
        assert t.t12 == -1j
        assert t.t13 == 0
        assert t.t23 == 0

    def test_rank_at_most_one(self, rng):
        k = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        t = rank1_coherency(PauliVector(*k))
        singular = np.linalg.svd(t.to_array(), compute_uv=False)
        assert singular[1] <= 1e-12 * singular[0]
        assert_allclose(t.trace(), np.sum(np.abs(k) ** 2), rtol=1e-12)

    def test_trace_identity_fuzz(self):
        rng = np.random.default_rng(2024)
        n = 100000
        s = symmetrize_reciprocal(ScatteringMatrix(*(rng.standard_normal((4, n)) + 1j * rng.standard_normal((4, n)))))
        t = rank1_coherency(pauli_vector(s))
        span = span_pixel(s)
        assert np.all(np.abs(t.trace() - span) <= 1e-9 * span)


class TestCoherencyMatrix:

    def test_hermitian_expansion(self):
        t = CoherencyMatrix(2, 1, 1, 0.5j, 0.25, -0.1j)
        a = t.to_array()
        assert_allclose(a, a.conj().T)
        assert t.trace() == 4

    def test_validate_rejects_negative_minor(self):
        with pytest.raises(RasterError):
            CoherencyMatrix(1, 1, 1, 2.0).validate()

    def test_from_array_round_trip(self, rng):
        k = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        a = np.outer(k, k.conj())
        assert_allclose(CoherencyMatrix.from_array(a).to_array(), a)


class TestBoxcar:

    def test_window_one_is_rank1(self, rng):
        raster = random_raster(rng, 5, 6)
        t = boxcar_coherency(raster, window=1)
        expected = rank1_coherency(pauli_vector(symmetrize_reciprocal(raster.pixels)))
        assert_array_equal(t.to_array(), expected.to_array())

    def test_constant_raster(self):
        value = np.array([1 + 1j, 0.5, 0.5, -2j])
        raster = PolsarRaster.from_array(np.broadcast_to(value[:, None, None], (4, 4, 4)))
        t = boxcar_coherency(raster, window=3)
        expected = rank1_coherency(pauli_vector(symmetrize_reciprocal(ScatteringMatrix(*value))))
        assert_allclose(t.to_array(), np.broadcast_to(expected.to_array(), (4, 4, 3, 3)), atol=1e-14)

    def test_center_matches_scalar_loop(self):
        stack = np.zeros((4, 3, 3), dtype=np.complex128)
        stack[:, :, :2] = np.array([1, 0, 0, 1])[:, None, None]
        stack[:, :, 2] = np.array([1j, 0.5, 0.5, -1j])[:, None]
        raster = PolsarRaster.from_array(stack)
        expected = np.zeros((3, 3), dtype=np.complex128)
        for i in range(3):
            for j in range(3):
                s = ScatteringMatrix(*stack[:, i, j])
                expected += rank1_coherency(pauli_vector(symmetrize_reciprocal(s))).to_array() / 9.0
        assert_allclose(boxcar_coherency(raster, 3)[1, 1].to_array(), expected, atol=1e-14)

    def test_border_averages_inside_pixels(self, rng):
        raster = random_raster(rng, 4, 4)
        full = rank1_coherency(pauli_vector(symmetrize_reciprocal(raster.pixels))).to_array()
        corner = boxcar_coherency(raster, 3)[0, 0].to_array()
        assert_allclose(corner, full[:2, :2].mean(axis=(0, 1)), atol=1e-13)

    def test_large_window_gives_global_mean(self, rng):
        raster = random_raster(rng, 5, 5)
        full = rank1_coherency(pauli_vector(symmetrize_reciprocal(raster.pixels))).to_array()
        assert_allclose(boxcar_coherency(raster, 9)[2, 2].to_array(), full.mean(axis=(0, 1)), atol=1e-13)

    def test_linearity_on_disjoint_supports(self, rng):
        checker = (np.indices((6, 7)).sum(axis=0) % 2).astype(bool)
        a = random_raster(rng, 6, 7).to_array() * checker
        b = random_raster(rng, 6, 7).to_array() * ~checker
        total = boxcar_coherency(PolsarRaster.from_array(a + b), 3).to_array()
        parts = (boxcar_coherency(PolsarRaster.from_array(a), 3).to_array()
                 + boxcar_coherency(PolsarRaster.from_array(b), 3).to_array())
        assert_allclose(total, parts, rtol=1e-9, atol=1e-13)

    def test_scaling(self, rng):
        a = random_raster(rng, 6, 7)
        assert_allclose(boxcar_coherency(a.scale(2.0), 3).to_array(), 4.0 * boxcar_coherency(a, 3).to_array(),
                        rtol=1e-9, atol=1e-13)

    def test_psd(self, rng):
        t = boxcar_coherency(random_raster(rng, 8, 8), 5)
        for i in range(8):
            for j in range(8):
                t[i, j].validate()

    @pytest.mark.parametrize('window', [0, 2, 4, -1, 1.5])
    def test_rejects_bad_window(self, rng, window):
        with pytest.raises(RasterError):
            boxcar_coherency(random_raster(rng, 3, 3), window)


class TestSpan:

    def test_examples(self):
        assert span_pixel(pixel(hh=3 + 4j)) == 25
        assert span_pixel(pixel(1, 1, 1, 1)) == 4
        assert span_pixel(pixel()) == 0

    def test_raster(self, rng):
        raster = PolsarRaster.from_array(np.array([3 + 4j, 0, 0, 0]).reshape(4, 1, 1))
        assert_array_equal(span_raster(raster), [[25.0]])
        assert_array_equal(span_raster(PolsarRaster.zeros(2, 3)), np.zeros((2, 3)))

    def test_matches_loop(self, rng):
        raster = random_raster(rng, 4, 4)
        stack = raster.to_array()
        expected = np.zeros((4, 4))
        for c in range(4):
            for i in range(4):
                for j in range(4):
                    expected[i, j] += stack[c, i, j].real ** 2 + stack[c, i, j].imag ** 2
        assert_allclose(span_raster(raster), expected, rtol=1e-12)

    @settings(deadline=None, max_examples=50)
    @given(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
           st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
           st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False))
    def test_trace_identity(self, hh, xv, vv):
        s = pixel(hh, xv, xv, vv)
        span = span_pixel(s)
        assert abs(rank1_coherency(pauli_vector(s)).trace() - span) <= 1e-9 * span + 1e-300


class TestRaster:

    def test_channels_round_trip(self, rng):
        raster = random_raster(rng, 3, 5)
        back = PolsarRaster.from_channels(raster.channels())
        assert_array_equal(back.to_array(), raster.to_array())

    def test_rejects_empty_grid(self):
        with pytest.raises(RasterError):
            PolsarRaster.from_array(np.zeros((4, 0, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(RasterError):
            pixel(hh=np.nan)

    def test_metadata_round_trip(self):
        meta = RasterMetadata(sensor='gf3', resolution=8.0, tags={'scene': 'a'})
        assert RasterMetadata.from_dict(meta.to_dict()) == meta
