"""OA, mIoU and mAcc of binary component masks.

Per-class IoU and accuracy average over the classes whose denominator is
non-zero, so a mask that is all 1 in both prediction and label scores 100.
"""
from __future__ import absolute_import

from dataclasses import dataclass
from typing import Dict

import numpy as np
from sklearn.metrics import confusion_matrix

from ..polsar.yamaguchi import COMPONENT_NAMES


@dataclass(frozen=True)
class EvalMetrics:
    oa: Dict[str, float]
    miou: Dict[str, float]
    macc: Dict[str, float]

    def mean(self, field):
        values = getattr(self, field)
        return float(np.mean([values[name] for name in COMPONENT_NAMES]))

    def to_dict(self):
        return {'oa': dict(self.oa), 'miou': dict(self.miou), 'macc': dict(self.macc),
                'mean': {field: self.mean(field) for field in ('oa', 'miou', 'macc')}}


def binary_confusion(pred, label):
    """2x2 counts, rows are labels and columns predictions."""
    return confusion_matrix(np.ravel(label).astype(np.int64), np.ravel(pred).astype(np.int64), labels=[0, 1])


def component_scores(pred, label):
    """(OA, mIoU, mAcc) in percent for one component."""
    cm = binary_confusion(pred, label).astype(np.float64)
    tp = np.diag(cm)
    support = cm.sum(axis=1)
    union = support + cm.sum(axis=0) - tp
    with np.errstate(invalid='ignore', divide='ignore'):
        iou = np.where(union > 0, tp / union, np.nan)
        acc = np.where(support > 0, tp / support, np.nan)
    oa = tp.sum() / cm.sum()
    return 100.0 * oa, 100.0 * np.nanmean(iou), 100.0 * np.nanmean(acc)


def eval_metrics(pred, labels, threshold=0.5):
    """Metrics of (4, ...) coefficient maps thresholded at ``threshold`` against (4, ...) {0,1} labels."""
    pred = np.asarray(pred)
    labels = np.asarray(labels)
    if pred.shape != labels.shape or pred.shape[0] != len(COMPONENT_NAMES):
        raise ValueError("predictions {} and labels {} must share a (4, ...) shape".format(pred.shape, labels.shape))
    oa, miou, macc = {}, {}, {}
    for i, name in enumerate(COMPONENT_NAMES):
        oa[name], miou[name], macc[name] = (float(v) for v in
                                            component_scores(pred[i] >= threshold, labels[i] >= 0.5))
    return EvalMetrics(oa, miou, macc)


class SegmentationEvaluator(object):
    """Accumulates confusion counts over scenes before scoring."""

    def __init__(self, threshold=0.5):
        self.threshold = threshold
        self.reset()

    def reset(self):
        self.preds = []
        self.labels = []

    def update(self, output):
        pred, labels = output
        self.preds.append(np.asarray(pred).reshape(len(COMPONENT_NAMES), -1))
        self.labels.append(np.asarray(labels).reshape(len(COMPONENT_NAMES), -1))

    def compute(self):
        if not self.preds:
            raise ValueError("no scenes to evaluate")
        return eval_metrics(np.concatenate(self.preds, axis=1), np.concatenate(self.labels, axis=1), self.threshold)
