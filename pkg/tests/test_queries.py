import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from scatterquery.polsar import ScatteringKind, all_bases, basis_matrix
from scatterquery.queries import (EMBED_DIM, QUERY_DIM, embed_pair, independence_report, init_query, load_queries,
                                  query_bank, sample_pairs, save_queries, shipped_queries)
from scatterquery.queries.initialization import kind_seed


@pytest.fixture(scope='module')
def queries():
    return shipped_queries()


class TestSamplePairs:

    def test_surface_eigenvector(self):
        surface = basis_matrix(ScatteringKind.SURFACE)
        assert_allclose(surface.matrix @ np.array([1, 0, 0]), [1, 0, 0])
        assert_allclose(surface.matrix @ np.array([0, 1, 0]), [0, 0, 0])

    @pytest.mark.parametrize('kind', list(ScatteringKind))
    def test_pairs_satisfy_forward_model(self, kind):
        basis = basis_matrix(kind)
        for y, x in sample_pairs(basis, 16, seed=3):
            assert abs(np.linalg.norm(y) - 1) <= 1e-12
            expected = np.array([sum(basis.matrix[i, j] * y[j] for j in range(3)) for i in range(3)])
            assert np.linalg.norm(x - expected) <= 1e-14

    def test_needs_one_pair(self):
        with pytest.raises(ValueError):
            sample_pairs(basis_matrix(ScatteringKind.SURFACE), 0, seed=0)


class TestEmbedPair:

    def test_deterministic(self):
        pair = sample_pairs(basis_matrix(ScatteringKind.HELIX), 1, seed=1)[0]
        assert_array_equal(embed_pair(pair), embed_pair(pair))
        assert embed_pair(pair).shape == (EMBED_DIM,)

    def test_zero_pair(self):
        assert_array_equal(embed_pair((np.zeros(3), np.zeros(3))), np.zeros(EMBED_DIM))

    def test_different_bases(self):
        y = sample_pairs(basis_matrix(ScatteringKind.SURFACE), 1, seed=2)[0][0]
        a = embed_pair((y, basis_matrix(ScatteringKind.SURFACE).matrix @ y))
        b = embed_pair((y, basis_matrix(ScatteringKind.DOUBLE_BOUNCE).matrix @ y))
        cosine = a @ b / (np.linalg.norm(a) * np.linalg.norm(b))
        assert cosine < 0.99


class TestInitQuery:

    def test_single_sample(self):
        basis = basis_matrix(ScatteringKind.VOLUME)
        query = init_query(basis, m=1, seed=5)
        pair = sample_pairs(basis, 1, kind_seed(5, basis.kind))[0]
        assert_allclose(query.vec768, embed_pair(pair), atol=1e-15)

    def test_unit_norm_and_deterministic(self):
        basis = basis_matrix(ScatteringKind.ADAPTIVE)
        a = init_query(basis, m=16, seed=8)
        b = init_query(basis, m=16, seed=8)
        assert a.vec256.shape == (QUERY_DIM,)
        assert np.linalg.norm(a.vec256) == pytest.approx(1.0, abs=1e-12)
        assert_array_equal(a.vec768, b.vec768)
        assert_array_equal(a.vec256, b.vec256)

    def test_converges_with_more_samples(self):
        basis = basis_matrix(ScatteringKind.ORIENTED_DIPOLE)
        coarse = np.linalg.norm(init_query(basis, 16, 3).vec768 - init_query(basis, 64, 4).vec768)
        fine = np.linalg.norm(init_query(basis, 1024, 3).vec768 - init_query(basis, 4096, 4).vec768)
        assert fine < coarse / 2


class TestIndependence:

    def test_shipped_queries_are_independent(self, queries):
        assert [q.kind for q in queries] == list(ScatteringKind)
        report = independence_report(queries)
        assert report.max_off_diagonal < 0.5
        assert report.passed
        assert_allclose(np.diag(report.cosines), 1.0, atol=1e-9)
        assert_allclose(report.cosines, report.cosines.T)

    def test_duplicates_fail(self, queries):
        report = independence_report([queries[0], queries[0]])
        assert report.max_off_diagonal == pytest.approx(1.0)
        assert not report.passed

    def test_orthogonal_vectors(self):
        report = independence_report(np.eye(3))
        assert report.max_off_diagonal == 0.0

    def test_needs_two(self, queries):
        with pytest.raises(ValueError):
            independence_report(queries[:1])

    def test_adaptive_distinct(self, queries):
        report = independence_report(queries)
        adaptive = int(ScatteringKind.ADAPTIVE)
        assert np.all(np.abs(np.delete(report.cosines[adaptive], adaptive)) < 0.5)


class TestQueryBank:

    def test_unit_rows(self, queries):
        bank = query_bank(queries, 16, seed=(0, 1))
        assert bank.shape == (10, 16)
        assert_allclose(np.linalg.norm(bank, axis=1), 1.0)
        assert_array_equal(bank, query_bank(queries, 16, seed=(0, 1)))


class TestSerialization:

    def test_save_load(self, queries, tmp_path):
        fpath = str(tmp_path / 'queries.sqqy')
        meta = save_queries(queries, fpath)
        loaded = load_queries(fpath)
        assert meta['kinds'][0] == 'surface'
        assert [q.kind for q in loaded] == [q.kind for q in queries]
        for a, b in zip(queries, loaded):
            assert_array_equal(a.vec256, b.vec256)
            assert_array_equal(a.vec768, b.vec768)
        assert len(all_bases()) == len(loaded)
