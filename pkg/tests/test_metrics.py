import numpy as np
import pytest
from numpy.testing import assert_array_equal

from scatterquery.evaluation_metrics import SegmentationEvaluator, binary_confusion, component_scores, eval_metrics


def random_labels(rng, shape=(4, 6, 6)):
    return rng.integers(0, 2, size=shape).astype(np.float64)


class TestConfusion:

    def test_matches_loop(self, rng):
        pred, label = rng.integers(0, 2, size=50), rng.integers(0, 2, size=50)
        expected = np.zeros((2, 2), dtype=np.int64)
        for p, y in zip(pred, label):
            expected[y, p] += 1
        assert_array_equal(binary_confusion(pred, label), expected)

    def test_scores_by_hand(self):
        label = np.array([1, 1, 0, 0])
        pred = np.array([1, 0, 0, 0])
        oa, miou, macc = component_scores(pred, label)
        assert oa == pytest.approx(75.0)
        assert miou == pytest.approx(100 * (2 / 3 + 1 / 2) / 2)
        assert macc == pytest.approx(100 * (1 + 1 / 2) / 2)

    def test_single_class(self):
        ones = np.ones(5)
        assert component_scores(ones, ones) == (100.0, 100.0, 100.0)


class TestEvalMetrics:

    def test_perfect(self, rng):
        labels = random_labels(rng)
        metrics = eval_metrics(labels, labels)
        for field in ('oa', 'miou', 'macc'):
            assert metrics.mean(field) == pytest.approx(100.0)

    def test_negated(self, rng):
        labels = random_labels(rng)
        metrics = eval_metrics(1.0 - labels, labels)
        assert metrics.mean('oa') == 0.0
        assert metrics.mean('miou') == 0.0

    def test_threshold(self, rng):
        labels = random_labels(rng)
        probabilities = np.where(labels > 0, 0.6, 0.4)
        assert eval_metrics(probabilities, labels).mean('oa') == pytest.approx(100.0)
        assert eval_metrics(probabilities, labels, threshold=0.7).to_dict()['mean']['oa'] < 100.0

    def test_shape_mismatch(self, rng):
        with pytest.raises(ValueError):
            eval_metrics(np.zeros((3, 2)), np.zeros((3, 2)))
        with pytest.raises(ValueError):
            eval_metrics(np.zeros((4, 2)), np.zeros((4, 3)))


class TestSegmentationEvaluator:

    def test_accumulates_scenes(self, rng):
        a, b = random_labels(rng), random_labels(rng, (4, 3, 3))
        pa, pb = random_labels(rng), random_labels(rng, (4, 3, 3))
        evaluator = SegmentationEvaluator()
        evaluator.update((pa, a))
        evaluator.update((pb, b))
        joint = eval_metrics(np.concatenate([pa.reshape(4, -1), pb.reshape(4, -1)], axis=1),
                             np.concatenate([a.reshape(4, -1), b.reshape(4, -1)], axis=1))
        assert evaluator.compute() == joint

    def test_empty(self):
        evaluator = SegmentationEvaluator()
        with pytest.raises(ValueError):
            evaluator.compute()
        evaluator.update((np.ones((4, 2)), np.ones((4, 2))))
        evaluator.reset()
        with pytest.raises(ValueError):
            evaluator.compute()
