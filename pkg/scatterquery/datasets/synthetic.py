from __future__ import absolute_import

import logging

import numpy as np

from ..polsar.bases import ADAPTIVE_SEED, TenPowers, synthesize_pixel
from ..polsar.core import SQRT2, PolsarRaster, RasterMetadata

logger = logging.getLogger("scatterquery.datasets")


def layout_region_map(layout, height, width):
    """Integer region map for the named layout.

    'single' is one region, 'halves' splits columns at width // 2 and
    'quadrants' numbers top-left, top-right, bottom-left, bottom-right.
    """
    rows = np.arange(height)[:, None] >= height // 2
    cols = np.arange(width)[None, :] >= width // 2
    if layout == 'single':
        return np.zeros((height, width), dtype=np.int64)
    if layout == 'halves':
        return np.broadcast_to(cols, (height, width)).astype(np.int64)
    if layout == 'quadrants':
        return (2 * rows + cols).astype(np.int64)
    raise KeyError("Unknown layout:", layout)


def pauli_factor(target):
    """L with L @ L^H == target, from the eigendecomposition of a PSD matrix."""
    w, v = np.linalg.eigh(target)
    return v * np.sqrt(np.maximum(w, 0.0))[None, :]


def principal_pauli(target):
    w, v = np.linalg.eigh(target)
    return np.sqrt(max(w[-1], 0.0)) * v[:, -1]


def lattice_pauli(target, rows, cols, rank_tol=1e-12):
    """Noise-free Pauli vectors for the pixels at ``rows``, ``cols``, shape (3, n).

    A rank-1 target puts its principal vector on every pixel. Otherwise pixel
    (r, c) carries sqrt(3 lambda_i) u_i with i = (r + c) mod 3, so every 3x3
    window (any window whose side is a multiple of 3) averages to the target.
    """
    w, v = np.linalg.eigh(target)
    w = np.maximum(w, 0.0)
    if w[-2] <= rank_tol * max(w[-1], np.finfo(np.float64).tiny):
        return np.repeat(principal_pauli(target)[:, None], len(rows), axis=1)
    components = v * np.sqrt(3.0 * w)[None, :]
    return components[:, (np.asarray(rows) + np.asarray(cols)) % 3]


def synthesize_scene(region_powers, region_map, seed, speckle=True, metadata=None,
                     adaptive_seed=ADAPTIVE_SEED):
    """Draw a raster whose expected coherency equals each region's target.

    Pauli vectors are zero-mean circular complex Gaussian with covariance
    ``synthesize_pixel(powers)``. Each region draws from its own child of
    ``SeedSequence(seed)``, spawned in sorted label order. With
    ``speckle=False`` pixels follow ``lattice_pauli`` instead, and the boxcar
    coherency of every 3x3 window inside a region equals its target.
    """
    region_map = np.asarray(region_map)
    if region_map.ndim != 2:
        raise ValueError("region map must be 2-D, got shape {}".format(region_map.shape))
    labels = sorted(int(label) for label in region_powers)
    unknown = sorted(set(np.unique(region_map).tolist()) - set(labels))
    if unknown:
        raise ValueError("region map uses labels without powers: {}".format(unknown))
    for label in labels:
        if not np.any(region_map == label):
            raise ValueError("region {} covers no pixels".format(label))

    height, width = region_map.shape
    k = np.zeros((3, height, width), dtype=np.complex128)
    children = np.random.SeedSequence(seed).spawn(len(labels))
    for label, child in zip(labels, children):
        powers = region_powers[label]
        if not isinstance(powers, TenPowers):
            powers = TenPowers(powers)
        target = synthesize_pixel(powers, adaptive_seed).to_array()
        mask = region_map == label
        if speckle:
            rng = np.random.default_rng(child)
            n = int(mask.sum())
            z = (rng.standard_normal((3, n)) + 1j * rng.standard_normal((3, n))) / SQRT2
            k[:, mask] = pauli_factor(target) @ z
        else:
            rows, cols = np.nonzero(mask)
            k[:, rows, cols] = lattice_pauli(target, rows, cols)
        logger.debug("region {}: {} pixels, target trace {:.4f}".format(label, int(mask.sum()),
                                                                          float(np.trace(target).real)))

    hh = (k[0] + k[1]) / SQRT2
    vv = (k[0] - k[1]) / SQRT2
    hv = k[2] / SQRT2
    return PolsarRaster.from_array(np.stack([hh, hv, hv, vv]), metadata or RasterMetadata())


def scene_from_config(cfg, seed=None):
    """Synthetic scene described by the SYNTH section."""
    region_map = layout_region_map(cfg.SYNTH.LAYOUT, cfg.SYNTH.HEIGHT, cfg.SYNTH.WIDTH)
    n_regions = int(region_map.max()) + 1
    if len(cfg.SYNTH.REGION_POWERS) < n_regions:
        raise ValueError("layout '{}' needs {} region power lists, config has {}"
                         .format(cfg.SYNTH.LAYOUT, n_regions, len(cfg.SYNTH.REGION_POWERS)))
    region_powers = {i: TenPowers(cfg.SYNTH.REGION_POWERS[i]) for i in range(n_regions)}
    metadata = RasterMetadata(sensor=cfg.SYNTH.SENSOR, resolution=float(cfg.SYNTH.RESOLUTION),
                              tags={'layout': cfg.SYNTH.LAYOUT, 'speckle': bool(cfg.SYNTH.SPECKLE),
                                    'seed': int(cfg.SEED if seed is None else seed)})
    return synthesize_scene(region_powers, region_map, cfg.SEED if seed is None else seed,
                            speckle=cfg.SYNTH.SPECKLE, metadata=metadata)
