from __future__ import absolute_import

from .segmentation import EvalMetrics, SegmentationEvaluator, binary_confusion, component_scores, eval_metrics
