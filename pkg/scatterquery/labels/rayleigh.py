"""Rayleigh statistics and equiprobability quantization of component powers.

Each Yamaguchi component of a scene is fitted with a Rayleigh law over its
positive values. Pixels are then bisected at the fitted median, so both
label classes are equally likely a priori.
"""
from __future__ import absolute_import

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import stats

from ..polsar.yamaguchi import COMPONENT_NAMES

logger = logging.getLogger("scatterquery.labels")

QUARTILE_LEVELS = (0.25, 0.5, 0.75)
MEDIAN_FACTOR = math.sqrt(2.0 * math.log(2.0))


class RayleighFitError(ValueError):
    """Too few positive samples to fit a Rayleigh scale."""


def rayleigh_pdf(x, mu):
    return stats.rayleigh.pdf(x, scale=mu)


def rayleigh_cdf(x, mu):
    return stats.rayleigh.cdf(x, scale=mu)


def quartile(mu, p):
    """Inverse CDF mu * sqrt(-2 ln(1 - p))."""
    return float(stats.rayleigh.ppf(p, scale=mu))


@dataclass(frozen=True)
class RayleighFit:
    mu: float
    quartiles: Tuple[float, float, float]
    n: int
    # zeros excluded from the fit
    n_dropped: int = 0

    def to_dict(self):
        return {'mu': self.mu, 'quartiles': list(self.quartiles), 'n': self.n, 'n_dropped': self.n_dropped}


def fit_rayleigh(samples):
    """Maximum-likelihood Rayleigh fit, mu = sqrt(sum x**2 / 2n), zeros dropped."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise RayleighFitError("samples must be finite")
    if np.any(x < 0):
        raise RayleighFitError("Rayleigh samples must be non-negative, got min {}".format(x.min()))
    positive = x[x > 0]
    if positive.size < 2:
        raise RayleighFitError("need at least 2 positive samples, got {}".format(positive.size))
    mu = float(np.sqrt(np.sum(positive ** 2) / (2.0 * positive.size)))
    return RayleighFit(mu, tuple(quartile(mu, p) for p in QUARTILE_LEVELS), int(positive.size),
                       int(x.size - positive.size))


def median_threshold(fit):
    return fit.mu * MEDIAN_FACTOR


def binarize_component(values, theta):
    """1 where value >= theta, else 0."""
    if not theta > 0:
        raise ValueError("threshold must be positive, got {}".format(theta))
    return (np.asarray(values) >= theta).astype(np.uint8)


@dataclass(frozen=True)
class BinaryLabelStack:
    """Four {0,1} masks in surface, double, volume, helix order.

    A degenerate component (fewer than two positive samples) has no fit, an
    infinite threshold and an all-0 mask.
    """

    masks: np.ndarray
    thresholds: Tuple[float, ...]
    fits: Tuple[Optional[RayleighFit], ...] = (None, None, None, None)

    def __post_init__(self):
        masks = np.asarray(self.masks, dtype=np.uint8)
        if masks.ndim != 3 or masks.shape[0] != len(COMPONENT_NAMES):
            raise ValueError("label stack must be (4, H, W), got {}".format(masks.shape))
        if np.any(masks > 1):
            raise ValueError("label masks must hold 0/1 values")
        if len(self.thresholds) != len(COMPONENT_NAMES) or not all(t > 0 for t in self.thresholds):
            raise ValueError("need four positive thresholds, got {}".format(self.thresholds))
        object.__setattr__(self, 'masks', masks)
        object.__setattr__(self, 'thresholds', tuple(float(t) for t in self.thresholds))

    @property
    def degenerate(self):
        return tuple(math.isinf(t) for t in self.thresholds)

    def to_planes(self):
        """8-bit planes, 0 or 255."""
        return (self.masks * 255).astype(np.uint8)

    @classmethod
    def from_planes(cls, planes, sidecar):
        planes = np.asarray(planes)
        thresholds = [math.inf if c['threshold'] is None else c['threshold'] for c in sidecar['components']]
        fits = [None if c['fit'] is None else
                RayleighFit(c['fit']['mu'], tuple(c['fit']['quartiles']), c['fit']['n'], c['fit']['n_dropped'])
                for c in sidecar['components']]
        return cls((planes >= 128).astype(np.uint8), tuple(thresholds), tuple(fits))

    def sidecar(self):
        components = []
        for i, name in enumerate(COMPONENT_NAMES):
            fit = self.fits[i]
            theta = self.thresholds[i]
            components.append({'name': name,
                               'threshold': None if math.isinf(theta) else theta,
                               'fit': None if fit is None else fit.to_dict(),
                               'degenerate': math.isinf(theta),
                               'mask_mean': float(self.masks[i].mean())})
        return {'components': components, 'fit_scope': 'scene',
                'height': int(self.masks.shape[1]), 'width': int(self.masks.shape[2])}


def generate_labels(stack):
    """Per-scene Rayleigh fit, median threshold and bisection for every component."""
    masks, thresholds, fits = [], [], []
    for i, name in enumerate(COMPONENT_NAMES):
        values = stack.powers[i]
        try:
            fit = fit_rayleigh(values)
        except RayleighFitError as e:
            logger.warning("Component {} is degenerate ({}), emitting an all-0 mask".format(name, e))
            masks.append(np.zeros(values.shape, dtype=np.uint8))
            thresholds.append(math.inf)
            fits.append(None)
            continue
        theta = median_threshold(fit)
        mask = binarize_component(values, theta)
        logger.debug("Component {}: mu {:.4g}, threshold {:.4g}, {} samples ({} zeros), mask mean {:.3f}"
                     .format(name, fit.mu, theta, fit.n, fit.n_dropped, mask.mean()))
        masks.append(mask)
        thresholds.append(theta)
        fits.append(fit)
    return BinaryLabelStack(np.stack(masks), tuple(thresholds), tuple(fits))


def label_statistics(labels):
    """Mask mean per component name."""
    return {name: float(labels.masks[i].mean()) for i, name in enumerate(COMPONENT_NAMES)}
