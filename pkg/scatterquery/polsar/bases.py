"""Ten-component scattering basis library.

Every basis is a unit-trace Hermitian PSD coherency matrix, so a weighted
sum of bases has trace equal to the sum of its weights.
"""
from __future__ import absolute_import

import enum
from dataclasses import dataclass

import numpy as np

from .core import CoherencyMatrix
from .yamaguchi import Branch, VOLUME_MATRICES, helix_matrix

# seed of the adaptive basis, part of the basis format
ADAPTIVE_SEED = 7


class ScatteringKind(enum.IntEnum):
    SURFACE = 0
    DOUBLE_BOUNCE = 1
    VOLUME = 2
    HELIX = 3
    ORIENTED_DIPOLE = 4
    COMPOUND_DIPOLE = 5
    MIXED_DIPOLE = 6
    ROTATED_DIHEDRAL = 7
    ROLL_INVARIANT_CROSS_POL = 8
    ADAPTIVE = 9


# the four generating bases of the Yamaguchi model, in component order
YAMAGUCHI_KINDS = (ScatteringKind.SURFACE, ScatteringKind.DOUBLE_BOUNCE,
                   ScatteringKind.VOLUME, ScatteringKind.HELIX)

_FIXED = {
    ScatteringKind.SURFACE: np.diag([1.0, 0.0, 0.0]),
    ScatteringKind.DOUBLE_BOUNCE: np.diag([0.0, 1.0, 0.0]),
    ScatteringKind.VOLUME: VOLUME_MATRICES[Branch.BALANCED],
    ScatteringKind.HELIX: helix_matrix(1.0),
    ScatteringKind.ORIENTED_DIPOLE: 0.5 * np.array([[1, 0, 1], [0, 0, 0], [1, 0, 1]]),
    ScatteringKind.COMPOUND_DIPOLE: 0.5 * np.array([[1, 0, -1j], [0, 0, 0], [1j, 0, 1]]),
    ScatteringKind.MIXED_DIPOLE: 0.5 * np.array([[0, 0, 0], [0, 1, 1], [0, 1, 1]]),
    ScatteringKind.ROTATED_DIHEDRAL: 0.5 * np.array([[0, 0, 0], [0, 1, -1], [0, -1, 1]]),
    ScatteringKind.ROLL_INVARIANT_CROSS_POL: np.diag([0.0, 0.0, 1.0]),
}


@dataclass(frozen=True)
class ScatteringBasis:
    kind: ScatteringKind
    matrix: np.ndarray

    def coherency(self):
        return CoherencyMatrix.from_array(self.matrix)


def adaptive_matrix(seed=ADAPTIVE_SEED):
    """Random PSD Hermitian matrix G G^H scaled to unit trace."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    a = g @ g.conj().T
    a = (a + a.conj().T) / 2
    return a / np.trace(a).real


def basis_matrix(kind, seed=ADAPTIVE_SEED):
    kind = ScatteringKind(kind)
    if kind == ScatteringKind.ADAPTIVE:
        matrix = adaptive_matrix(seed)
    else:
        matrix = np.array(_FIXED[kind], dtype=np.complex128)
    matrix.setflags(write=False)
    return ScatteringBasis(kind, matrix)


def all_bases(seed=ADAPTIVE_SEED):
    return [basis_matrix(kind, seed) for kind in ScatteringKind]


@dataclass(frozen=True)
class TenPowers:
    """Non-negative powers ordered by ScatteringKind."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.shape != (len(ScatteringKind),):
            raise ValueError("TenPowers needs {} powers, got shape {}".format(len(ScatteringKind), p.shape))
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValueError("powers must be finite and non-negative, got {}".format(p.tolist()))
        p.setflags(write=False)
        object.__setattr__(self, 'p', p)

    @classmethod
    def from_mapping(cls, mapping):
        p = np.zeros(len(ScatteringKind))
        for kind, power in mapping.items():
            p[ScatteringKind(kind)] = power
        return cls(p)

    def __getitem__(self, kind):
        return self.p[ScatteringKind(kind)]


def synthesize_pixel(powers, seed=ADAPTIVE_SEED):
    """Forward model: sum of p_i times basis_i."""
    matrix = np.zeros((3, 3), dtype=np.complex128)
    for basis, power in zip(all_bases(seed), powers.p):
        matrix = matrix + power * basis.matrix
    return CoherencyMatrix.from_array(matrix)


def reconstruct_power(powers):
    return float(np.sum(powers.p))


def bases_to_json(seed=ADAPTIVE_SEED):
    """kind -> 3x3 [re, im] entries, for audit."""
    doc = {'adaptive_seed': seed, 'bases': {}}
    for basis in all_bases(seed):
        doc['bases'][basis.kind.name.lower()] = [[[float(v.real), float(v.imag)] for v in row]
                                                 for row in basis.matrix]
    return doc
