from __future__ import absolute_import

import logging
from dataclasses import dataclass

import numpy as np

from ..labels import generate_labels
from ..polsar import boxcar_coherency, decompose_raster, span_raster

logger = logging.getLogger("scatterquery.datasets")


@dataclass(frozen=True)
class TrainingSample:
    """One scene prepared at feature resolution.

    ``inputs`` is the (8, H, W) channel stack, ``labels`` the (4, H', W')
    majority-voted masks and ``span`` the (H', W') window-mean SPAN, both
    in units of the scene mean power when power normalization is on.
    """

    name: str
    inputs: np.ndarray
    labels: np.ndarray
    span: np.ndarray
    power_scale: float

    @property
    def feature_shape(self):
        return self.span.shape


def _check_tiling(shape, patch):
    height, width = shape
    if height % patch or width % patch:
        raise ValueError("scene of {}x{} does not tile into {}-pixel patches".format(height, width, patch))


def downsample_labels(masks, patch):
    """Majority vote per patch, ties go to 1."""
    masks = np.asarray(masks, dtype=np.int64)
    c, h, w = masks.shape
    _check_tiling((h, w), patch)
    votes = masks.reshape(c, h // patch, patch, w // patch, patch).sum(axis=(2, 4))
    return (2 * votes >= patch * patch).astype(np.float64)


def downsample_span(span, patch):
    span = np.asarray(span, dtype=np.float64)
    h, w = span.shape
    _check_tiling((h, w), patch)
    return span.reshape(h // patch, patch, w // patch, patch).mean(axis=(1, 3))


def scene_labels(raster, window):
    """Boxcar coherency, Yamaguchi decomposition and Rayleigh labels of one raster."""
    stack = decompose_raster(boxcar_coherency(raster, window))
    return stack, generate_labels(stack)


def prepare_sample(raster, labels, patch, power_norm=True, name='scene'):
    span = span_raster(raster)
    _check_tiling(span.shape, patch)
    power_scale = float(span.mean()) if power_norm else 1.0
    if not power_scale > 0:
        logger.warning("Scene '{}' has zero mean power, skipping normalization".format(name))
        power_scale = 1.0
    inputs = raster.channels() / np.sqrt(power_scale)
    sample = TrainingSample(name, inputs,
                            downsample_labels(labels.masks, patch),
                            downsample_span(span / power_scale, patch),
                            power_scale)
    logger.debug("Prepared '{}': inputs {}, features {}, power scale {:.4g}"
                 .format(name, inputs.shape, sample.feature_shape, power_scale))
    return sample


def make_dataset(cfg, raster, labels=None, name='scene'):
    """Training sample for one raster, deriving labels when none are given."""
    if labels is None:
        _, labels = scene_labels(raster, cfg.INPUT.WINDOW)
    return prepare_sample(raster, labels, cfg.MODEL.PATCH_SIZE, cfg.INPUT.POWER_NORM, name)
