"""Per-pixel polarimetric primitives.

Every type here is array-valued and follows numpy broadcasting. A
``ScatteringMatrix`` whose fields are complex scalars describes one pixel,
one whose fields are ``(H, W)`` arrays describes a whole grid, and the
operations below work unchanged on both. Samples are ``complex128`` (the
real and imaginary parts of a complex sample, linear amplitude units).
"""
from __future__ import absolute_import

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy import ndimage

SQRT2 = np.sqrt(2.0)
# plane order shared with the CPXR container
CHANNEL_NAMES = ('hh', 'hv', 'vh', 'vv')


class RasterError(ValueError):
    """Bad raster geometry, non-finite samples or an invalid window."""


def _complex_field(value):
    return np.asarray(value, dtype=np.complex128)


def _check_finite(owner, **arrays):
    for name, value in arrays.items():
        if not np.all(np.isfinite(value)):
            raise RasterError("{}.{} holds non-finite samples".format(owner, name))


@dataclass(frozen=True)
class ScatteringMatrix:
    """2x2 scattering matrix [[S_HH, S_HV], [S_VH, S_VV]]."""

    s_hh: Any
    s_hv: Any
    s_vh: Any
    s_vv: Any

    def __post_init__(self):
        values = {name: _complex_field(getattr(self, 's_' + name)) for name in CHANNEL_NAMES}
        _check_finite('ScatteringMatrix', **values)
        shapes = {v.shape for v in values.values()}
        if len(shapes) != 1:
            raise RasterError("ScatteringMatrix entries disagree in shape: {}".format(sorted(shapes)))
        for name, value in values.items():
            object.__setattr__(self, 's_' + name, value)

    @property
    def shape(self):
        return self.s_hh.shape

    def __getitem__(self, index):
        return ScatteringMatrix(self.s_hh[index], self.s_hv[index], self.s_vh[index], self.s_vv[index])

    def to_array(self):
        """Stack as (4, ...) complex in HH, HV, VH, VV order."""
        return np.stack([self.s_hh, self.s_hv, self.s_vh, self.s_vv])


@dataclass(frozen=True)
class PauliVector:
    k1: Any
    k2: Any
    k3: Any

    def __post_init__(self):
        for name in ('k1', 'k2', 'k3'):
            object.__setattr__(self, name, _complex_field(getattr(self, name)))

    @property
    def power(self):
        return np.abs(self.k1) ** 2 + np.abs(self.k2) ** 2 + np.abs(self.k3) ** 2


@dataclass(frozen=True)
class CoherencyMatrix:
    """Hermitian 3x3 coherency matrix; only the upper triangle is stored.

    ``t11``, ``t22`` and ``t33`` are real powers, the off-diagonal entries
    are complex. Fields may be scalars or equally shaped grids.
    """

    t11: Any
    t22: Any
    t33: Any
    t12: Any = 0.0
    t13: Any = 0.0
    t23: Any = 0.0

    def __post_init__(self):
        diag = [np.asarray(getattr(self, name), dtype=np.float64) for name in ('t11', 't22', 't33')]
        off = [_complex_field(getattr(self, name)) for name in ('t12', 't13', 't23')]
        try:
            arrays = np.broadcast_arrays(*(diag + off))
        except ValueError:
            raise RasterError("CoherencyMatrix entries do not share a geometry")
        for name, value in zip(('t11', 't22', 't33', 't12', 't13', 't23'), arrays):
            object.__setattr__(self, name, np.array(value))

    @classmethod
    def zeros(cls, shape=()):
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(shape))

    @classmethod
    def from_array(cls, array):
        """Build from a (..., 3, 3) complex array, reading the upper triangle."""
        array = np.asarray(array, dtype=np.complex128)
        if array.shape[-2:] != (3, 3):
            raise RasterError("expected (..., 3, 3), got {}".format(array.shape))
        return cls(array[..., 0, 0].real, array[..., 1, 1].real, array[..., 2, 2].real,
                   array[..., 0, 1], array[..., 0, 2], array[..., 1, 2])

    @property
    def shape(self):
        return self.t11.shape

    def __getitem__(self, index):
        return CoherencyMatrix(self.t11[index], self.t22[index], self.t33[index],
                               self.t12[index], self.t13[index], self.t23[index])

    def __add__(self, other):
        return CoherencyMatrix(self.t11 + other.t11, self.t22 + other.t22, self.t33 + other.t33,
                               self.t12 + other.t12, self.t13 + other.t13, self.t23 + other.t23)

    def scale(self, factor):
        return CoherencyMatrix(factor * self.t11, factor * self.t22, factor * self.t33,
                               factor * self.t12, factor * self.t13, factor * self.t23)

    def trace(self):
        return self.t11 + self.t22 + self.t33

    def to_array(self):
        out = np.zeros(self.shape + (3, 3), dtype=np.complex128)
        out[..., 0, 0] = self.t11
        out[..., 1, 1] = self.t22
        out[..., 2, 2] = self.t33
        out[..., 0, 1] = self.t12
        out[..., 0, 2] = self.t13
        out[..., 1, 2] = self.t23
        out[..., 1, 0] = np.conj(self.t12)
        out[..., 2, 0] = np.conj(self.t13)
        out[..., 2, 1] = np.conj(self.t23)
        return out

    def minor_violation(self):
        """Worst principal-minor shortfall, relative to trace (1x1) and trace**2 (2x2).

        Zero for a PSD matrix, positive otherwise.
        """
        trace = np.maximum(np.abs(self.trace()), np.finfo(np.float64).tiny)
        first = np.stack([self.t11, self.t22, self.t33]) / trace
        second = np.stack([
            self.t11 * self.t22 - np.abs(self.t12) ** 2,
            self.t11 * self.t33 - np.abs(self.t13) ** 2,
            self.t22 * self.t33 - np.abs(self.t23) ** 2,
        ]) / trace ** 2
        worst = max(float(np.max(-first, initial=0.0)), float(np.max(-second, initial=0.0)))
        return max(worst, 0.0)

    def validate(self, tol=1e-9):
        violation = self.minor_violation()
        if violation > tol:
            raise RasterError("coherency matrix is not PSD: minor violation {:.3e} > {:.1e}"
                              .format(violation, tol))
        return self


@dataclass(frozen=True)
class RasterMetadata:
    sensor: str = 'synthetic'
    # pixel spacing in meters
    resolution: Optional[float] = None
    tags: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self):
        return {'sensor': self.sensor, 'resolution': self.resolution, 'tags': dict(self.tags)}

    @classmethod
    def from_dict(cls, obj):
        return cls(sensor=obj.get('sensor', 'synthetic'), resolution=obj.get('resolution'),
                   tags=dict(obj.get('tags', {})))


@dataclass(frozen=True)
class PolsarRaster:
    """Row-major grid of scattering matrices plus acquisition metadata."""

    pixels: ScatteringMatrix
    metadata: RasterMetadata = field(default_factory=RasterMetadata)

    def __post_init__(self):
        shape = self.pixels.shape
        if len(shape) != 2 or min(shape) < 1:
            raise RasterError("raster needs a 2-D grid of at least 1x1 pixels, got shape {}".format(shape))

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @classmethod
    def from_array(cls, stack, metadata=None):
        """Build from a complex (4, H, W) array in HH, HV, VH, VV order."""
        stack = np.asarray(stack)
        if stack.ndim != 3 or stack.shape[0] != 4:
            raise RasterError("expected a (4, H, W) complex stack, got shape {}".format(stack.shape))
        return cls(ScatteringMatrix(*stack), metadata or RasterMetadata())

    @classmethod
    def from_channels(cls, channels, metadata=None):
        """Inverse of :meth:`channels`."""
        channels = np.asarray(channels, dtype=np.float64)
        if channels.ndim != 3 or channels.shape[0] != 8:
            raise RasterError("expected (8, H, W) real channels, got shape {}".format(channels.shape))
        return cls.from_array(channels[0::2] + 1j * channels[1::2], metadata)

    @classmethod
    def zeros(cls, height, width, metadata=None):
        return cls.from_array(np.zeros((4, height, width), dtype=np.complex128), metadata)

    def to_array(self):
        return self.pixels.to_array()

    def channels(self):
        """8-channel real stack re(HH), im(HH), re(HV), im(HV), re(VH), im(VH), re(VV), im(VV)."""
        stack = self.to_array()
        out = np.empty((8,) + stack.shape[1:], dtype=np.float64)
        out[0::2] = stack.real
        out[1::2] = stack.imag
        return out

    def scale(self, factor):
        return PolsarRaster.from_array(self.to_array() * factor, self.metadata)


def symmetrize_reciprocal(s):
    cross = (s.s_hv + s.s_vh) / 2
    return ScatteringMatrix(s.s_hh, cross, cross, s.s_vv)


def pauli_vector(s):
    """Pauli vector (S_HH+S_VV, S_HH-S_VV, 2 S_xv) / sqrt(2) of a symmetrized matrix.

    With S_HV == S_VH the third entry equals (S_HV+S_VH)/sqrt(2), so
    ``|k|**2`` equals the span.
    """
    return PauliVector((s.s_hh + s.s_vv) / SQRT2,
                       (s.s_hh - s.s_vv) / SQRT2,
                       (s.s_hv + s.s_vh) / SQRT2)


def rank1_coherency(k):
    return CoherencyMatrix(np.abs(k.k1) ** 2, np.abs(k.k2) ** 2, np.abs(k.k3) ** 2,
                           k.k1 * np.conj(k.k2), k.k1 * np.conj(k.k3), k.k2 * np.conj(k.k3))


def _window_mean(values, window, count):
    if np.iscomplexobj(values):
        return _window_mean(values.real, window, count) + 1j * _window_mean(values.imag, window, count)
    return ndimage.uniform_filter(values, size=window, mode='constant', cval=0.0) / count


def boxcar_coherency(raster, window=3):
    """Spatially averaged coherency over an odd ``window`` x ``window`` box.

    The box shrinks to its intersection with the grid at the borders, so
    border pixels average fewer looks instead of padded zeros.
    """
    if int(window) != window or window < 1 or window % 2 == 0:
        raise RasterError("boxcar window must be an odd positive pixel count, got {}".format(window))
    window = int(window)
    t = rank1_coherency(pauli_vector(symmetrize_reciprocal(raster.pixels)))
    if window == 1:
        return t
    count = ndimage.uniform_filter(np.ones(t.shape), size=window, mode='constant', cval=0.0)
    # running sums can leave -1e-17 on a power that should be zero
    return CoherencyMatrix(np.maximum(_window_mean(t.t11, window, count), 0.0),
                           np.maximum(_window_mean(t.t22, window, count), 0.0),
                           np.maximum(_window_mean(t.t33, window, count), 0.0),
                           _window_mean(t.t12, window, count),
                           _window_mean(t.t13, window, count),
                           _window_mean(t.t23, window, count))


def span_pixel(s):
    return np.abs(s.s_hh) ** 2 + np.abs(s.s_hv) ** 2 + np.abs(s.s_vh) ** 2 + np.abs(s.s_vv) ** 2


def span_raster(raster):
    return span_pixel(raster.pixels)
