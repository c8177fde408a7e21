from __future__ import absolute_import

import numpy as np
import os.path as osp
from PIL import Image

from ..polsar.core import pauli_vector, symmetrize_reciprocal
from ..polsar.yamaguchi import ComponentStack
from .iotools import mkdir_if_missing

# channel value at DISPLAY_SCALE * channel mean saturates to 255
DISPLAY_SCALE = 2.5
COMPOSITE_MODES = ('pauli', 'yamaguchi')


def scale_channel(values):
    """255 * v / (2.5 * mean(v)), rounded and clipped to 8 bits; a zero-mean channel is black."""
    values = np.asarray(values, dtype=np.float64)
    level = DISPLAY_SCALE * values.mean()
    if not level > 0:
        return np.zeros(values.shape, dtype=np.uint8)
    return np.clip(np.rint(255.0 * values / level), 0, 255).astype(np.uint8)


def pauli_channels(raster):
    k = pauli_vector(symmetrize_reciprocal(raster.pixels))
    return np.abs(k.k2) ** 2, np.abs(k.k3) ** 2, np.abs(k.k1) ** 2


def yamaguchi_channels(stack):
    return stack.component('double'), stack.component('volume'), stack.component('surface')


def emit_composite(source, mode):
    """(H, W, 3) uint8 RGB.

    pauli maps (|k2|^2, |k3|^2, |k1|^2) and yamaguchi maps (Pd, Pv, Ps) to
    (R, G, B). ``source`` is a PolsarRaster for pauli and a ComponentStack
    for yamaguchi.
    """
    if mode == 'pauli':
        channels = pauli_channels(source)
    elif mode == 'yamaguchi':
        if not isinstance(source, ComponentStack):
            raise TypeError("yamaguchi composites need a ComponentStack, got {}".format(type(source).__name__))
        channels = yamaguchi_channels(source)
    else:
        raise KeyError("Unknown composite mode:", mode)
    return np.stack([scale_channel(c) for c in channels], axis=-1)


def save_png(rgb, fpath):
    mkdir_if_missing(osp.dirname(fpath))
    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8)).save(fpath, format='PNG')
    return fpath
