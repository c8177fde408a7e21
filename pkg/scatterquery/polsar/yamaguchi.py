"""Yamaguchi four-component decomposition of coherency matrices.

The model reads ``T = Ps T_surface + Pd T_double + Pv T_volume + Ph T_helix``.
Every function is vectorized over the coherency grid, and a scalar
``CoherencyMatrix`` gives scalar results.
"""
from __future__ import absolute_import

import enum
from dataclasses import dataclass
from typing import Any, NamedTuple, Optional

import numpy as np

COMPONENT_NAMES = ('surface', 'double', 'volume', 'helix')
# |10 log10(Pvv/Phh)| at or below this selects the balanced volume model
BALANCED_DB = 2.0
# divisions and clamp flags are guarded relative to trace(T)
GUARD = 1e-12


class Branch(enum.IntEnum):
    BALANCED = 0
    VV_DOMINANT = 1
    HH_DOMINANT = 2


VOLUME_MATRICES = {
    Branch.BALANCED: np.diag([2.0, 1.0, 1.0]) / 4.0,
    Branch.VV_DOMINANT: np.array([[15.0, -5.0, 0.0], [-5.0, 7.0, 0.0], [0.0, 0.0, 8.0]]) / 30.0,
    Branch.HH_DOMINANT: np.array([[15.0, 5.0, 0.0], [5.0, 7.0, 0.0], [0.0, 0.0, 8.0]]) / 30.0,
}


def helix_matrix(sign=1.0):
    """(1/2)[[0,0,0],[0,1,+-j],[0,-+j,1]] with the sign of Im(t23)."""
    return 0.5 * np.array([[0, 0, 0], [0, 1, 1j * sign], [0, -1j * sign, 1]], dtype=np.complex128)


class VolumeBranch(NamedTuple):
    branch: Any
    pv: Any
    # Phh or Pvv <= 0, branch fell back to balanced
    ratio_undefined: Any
    clipped: Any


class SurfaceDouble(NamedTuple):
    ps: Any
    pd: Any
    clipped: Any


@dataclass(frozen=True)
class YamaguchiPowers:
    ps: Any
    pd: Any
    pv: Any
    ph: Any
    branch: Any
    clipped: Any
    ratio_undefined: Any = False

    def total(self):
        return self.ps + self.pd + self.pv + self.ph


def helix_power(t):
    return np.minimum(2.0 * np.abs(t.t23.imag), np.maximum(t.trace(), 0.0))


def volume_branch(t, ph=None):
    """Pick the volume model from the co-pol ratio and size its power."""
    if ph is None:
        ph = helix_power(t)
    trace = t.trace()
    phh = (t.t11 + t.t22 + 2.0 * t.t12.real) / 2.0
    pvv = (t.t11 + t.t22 - 2.0 * t.t12.real) / 2.0
    undefined = (phh <= 0) | (pvv <= 0)
    ratio = 10.0 * np.log10(np.where(undefined, 1.0, pvv) / np.where(undefined, 1.0, phh))

    branch = np.full(np.shape(trace), int(Branch.BALANCED), dtype=np.int8)
    branch = np.where(~undefined & (ratio > BALANCED_DB), int(Branch.VV_DOMINANT), branch)
    branch = np.where(~undefined & (ratio < -BALANCED_DB), int(Branch.HH_DOMINANT), branch)

    residual = 2.0 * t.t33 - ph
    raw = np.where(branch == Branch.BALANCED, 2.0 * residual, 15.0 / 8.0 * residual)
    upper = np.maximum(trace - ph, 0.0)
    pv = np.clip(raw, 0.0, upper)
    tol = GUARD * np.abs(trace)
    clipped = (raw < -tol) | (raw > upper + tol)
    return VolumeBranch(branch.astype(np.int8), pv, undefined, clipped)


def _volume_entries(branch):
    balanced = branch == Branch.BALANCED
    v11 = np.full(np.shape(branch), 0.5)
    v22 = np.where(balanced, 0.25, 7.0 / 30.0)
    v12 = np.where(balanced, 0.0, np.where(branch == Branch.VV_DOMINANT, -1.0 / 6.0, 1.0 / 6.0))
    return v11, v22, v12


def surface_double(t, pv, branch, ph):
    """Split what remains after removing volume and helix into surface and double bounce.

    The remainder keeps S = t'11, D = t'22 and C = t'12. The dominant
    diagonal absorbs |C|**2 and the other loses it, so Ps + Pd == S + D
    until a clamp fires. The helix term only touches t22, t33 and t23, so
    its sign does not enter here.
    """
    trace = t.trace()
    v11, v22, v12 = _volume_entries(np.asarray(branch))
    s = t.t11 - pv * v11
    d = t.t22 - pv * v22 - ph / 2.0
    c2 = np.abs(t.t12 - pv * v12) ** 2

    guard = GUARD * np.abs(trace)
    small = (s <= guard) & (d <= guard)
    surface_dominant = s >= d
    s_den = np.where(surface_dominant & ~small, s, 1.0)
    d_den = np.where(~surface_dominant & ~small, d, 1.0)
    ps = np.where(surface_dominant, s + c2 / s_den, s - c2 / d_den)
    pd = np.where(surface_dominant, d - c2 / s_den, d + c2 / d_den)
    ps = np.where(small, 0.0, ps)
    pd = np.where(small, 0.0, pd)
    total = ps + pd

    clipped = (ps < -guard) | (pd < -guard) | (small & (s + d < -guard))
    ps, pd = np.where(ps < 0, 0.0, ps), np.where(ps < 0, total, pd)
    ps, pd = np.where(pd < 0, total, ps), np.where(pd < 0, 0.0, pd)
    ps, pd = np.maximum(ps, 0.0), np.maximum(pd, 0.0)

    # never hand out more than trace - Pv - Ph
    budget = np.maximum(trace - pv - ph, 0.0)
    pair = ps + pd
    over = pair > budget * (1.0 + 1e-9) + guard
    factor = np.where(over, budget / np.where(over, pair, 1.0), 1.0)
    return SurfaceDouble(ps * factor, pd * factor, clipped | over)


def _to_scalar(value):
    value = np.asarray(value)
    return value.item() if value.ndim == 0 else value


def yamaguchi_decompose(t):
    ph = helix_power(t)
    volume = volume_branch(t, ph)
    split = surface_double(t, volume.pv, volume.branch, ph)
    powers = [_to_scalar(p) for p in (split.ps, split.pd, volume.pv, ph)]
    branch = _to_scalar(volume.branch)
    if np.ndim(branch) == 0:
        branch = Branch(branch)
    return YamaguchiPowers(*powers, branch=branch,
                           clipped=_to_scalar(volume.clipped | split.clipped),
                           ratio_undefined=_to_scalar(volume.ratio_undefined))


@dataclass(frozen=True)
class ComponentStack:
    """Four power grids in surface, double, volume, helix order.

    ``branch`` and ``clipped`` are per-pixel decomposition diagnostics. They
    are ``None`` when the stack comes from a file.
    """

    powers: np.ndarray
    branch: Optional[np.ndarray] = None
    clipped: Optional[np.ndarray] = None
    ratio_undefined: Optional[np.ndarray] = None

    def __post_init__(self):
        powers = np.asarray(self.powers, dtype=np.float64)
        if powers.ndim != 3 or powers.shape[0] != 4:
            raise ValueError("component stack must be (4, H, W), got {}".format(powers.shape))
        if np.any(powers < 0):
            raise ValueError("component powers must be non-negative")
        object.__setattr__(self, 'powers', powers)

    @property
    def height(self):
        return self.powers.shape[1]

    @property
    def width(self):
        return self.powers.shape[2]

    def component(self, name):
        return self.powers[COMPONENT_NAMES.index(name)]

    def sidecar(self):
        """Branch statistics and clip counts for the JSON sidecar."""
        info = {'components': list(COMPONENT_NAMES), 'height': self.height, 'width': self.width,
                'mean_power': {name: float(self.powers[i].mean()) for i, name in enumerate(COMPONENT_NAMES)}}
        if self.branch is not None:
            info['branch_counts'] = {b.name.lower(): int(np.sum(self.branch == b)) for b in Branch}
        if self.clipped is not None:
            info['clipped_pixels'] = int(np.sum(self.clipped))
        if self.ratio_undefined is not None:
            info['ratio_undefined_pixels'] = int(np.sum(self.ratio_undefined))
        return info


def decompose_raster(grid):
    """Element-wise decomposition of a coherency grid into a ComponentStack."""
    ph = helix_power(grid)
    volume = volume_branch(grid, ph)
    split = surface_double(grid, volume.pv, volume.branch, ph)
    powers = np.stack([split.ps, split.pd, volume.pv, ph]).astype(np.float64)
    return ComponentStack(np.maximum(powers, 0.0), branch=volume.branch,
                          clipped=volume.clipped | split.clipped, ratio_undefined=volume.ratio_undefined)
