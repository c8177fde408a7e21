"""Scattering query initialization.

A query summarizes its basis T through sample pairs (Y, X = T Y). Every pair
is serialized to 12 reals and lifted to ``EMBED_DIM`` by a fixed seeded
projection followed by ``sin``. The pair embeddings are averaged, and a fixed
matching projection to ``QUERY_DIM`` is unit-normalized.

``sin`` is odd, so the zero pair embeds to zero. At the projection scale
used here the sine features of distinct pairs are nearly orthogonal, which
keeps queries of different bases apart.
"""
from __future__ import absolute_import

import functools
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..polsar.bases import ADAPTIVE_SEED, ScatteringKind, all_bases
from ..utils.serialization import QUERIES_MAGIC, read_blob, write_blob

logger = logging.getLogger("scatterquery.queries")

PAIR_DIM = 12
EMBED_DIM = 768
QUERY_DIM = 256
# the projection seeds and scale are part of the query format version
QUERY_FORMAT_VERSION = 1
EMBED_SEED = 1501
MATCH_SEED = 1502
EMBED_SCALE = 4.0
DEFAULT_NUM_SAMPLES = 64
DEFAULT_SEED = 20240607
INDEPENDENCE_LIMIT = 0.5


@functools.lru_cache(maxsize=None)
def embedding_projection(dim=EMBED_DIM, seed=EMBED_SEED):
    projection = EMBED_SCALE * np.random.default_rng(seed).standard_normal((dim, PAIR_DIM))
    projection.setflags(write=False)
    return projection


@functools.lru_cache(maxsize=None)
def matching_projection(in_dim=EMBED_DIM, out_dim=QUERY_DIM, seed=MATCH_SEED):
    projection = np.random.default_rng(seed).standard_normal((out_dim, in_dim)) / np.sqrt(in_dim)
    projection.setflags(write=False)
    return projection


@dataclass(frozen=True)
class ScatteringQuery:
    kind: ScatteringKind
    vec768: np.ndarray
    vec256: np.ndarray
    seed: int
    m: int


@dataclass(frozen=True)
class IndependenceReport:
    cosines: np.ndarray
    max_off_diagonal: float
    kinds: Tuple[str, ...] = ()

    @property
    def passed(self):
        return self.max_off_diagonal < INDEPENDENCE_LIMIT

    def to_dict(self):
        return {'kinds': list(self.kinds), 'cosines': self.cosines.tolist(),
                'max_off_diagonal': self.max_off_diagonal, 'passed': self.passed}


def sample_pairs(basis, m, seed):
    """m pairs (Y, X) with Y a seeded unit-norm complex 3-vector and X = T Y."""
    if m < 1:
        raise ValueError("need at least one sample pair, got m={}".format(m))
    rng = np.random.default_rng(seed)
    ys = rng.standard_normal((m, 3)) + 1j * rng.standard_normal((m, 3))
    ys /= np.linalg.norm(ys, axis=1, keepdims=True)
    return [(y, basis.matrix @ y) for y in ys]


def serialize_pair(pair):
    y, x = pair
    y = np.asarray(y, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    return np.concatenate([y.real, y.imag, x.real, x.imag])


def embed_pair(pair, dim=EMBED_DIM, seed=EMBED_SEED):
    v = serialize_pair(pair)
    if not np.all(np.isfinite(v)):
        raise ValueError("sample pair must be finite")
    return np.sin(embedding_projection(dim, seed) @ v)


def kind_seed(seed, kind):
    """Seed of one basis' sample stream, so kinds draw independent pairs."""
    return (int(seed), int(kind))


def init_query(basis, m=DEFAULT_NUM_SAMPLES, seed=DEFAULT_SEED, embed_dim=EMBED_DIM, query_dim=QUERY_DIM):
    pairs = sample_pairs(basis, m, kind_seed(seed, basis.kind))
    vec768 = np.mean(np.stack([embed_pair(pair, embed_dim) for pair in pairs]), axis=0)
    matched = matching_projection(embed_dim, query_dim) @ vec768
    norm = np.linalg.norm(matched)
    if norm == 0:
        raise ValueError("query of {} collapsed to zero".format(basis.kind.name))
    return ScatteringQuery(basis.kind, vec768, matched / norm, int(seed), int(m))


def shipped_queries(m=DEFAULT_NUM_SAMPLES, seed=DEFAULT_SEED, adaptive_seed=ADAPTIVE_SEED,
                    embed_dim=EMBED_DIM, query_dim=QUERY_DIM):
    """The ten queries, one per ScatteringKind, in kind order."""
    return [init_query(basis, m, seed, embed_dim, query_dim) for basis in all_bases(adaptive_seed)]


def _unit_rows(vectors):
    rows = np.stack([np.asarray(getattr(v, 'vec256', v), dtype=np.float64) for v in vectors])
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def independence_report(queries):
    if len(queries) < 2:
        raise ValueError("independence report needs at least 2 queries, got {}".format(len(queries)))
    rows = _unit_rows(queries)
    cosines = rows @ rows.T
    cosines = (cosines + cosines.T) / 2
    off = np.abs(cosines[~np.eye(len(rows), dtype=bool)])
    kinds = tuple(q.kind.name.lower() if hasattr(q, 'kind') else str(i) for i, q in enumerate(queries))
    report = IndependenceReport(cosines, float(off.max()), kinds)
    if not report.passed:
        logger.warning("queries are not independent: max off-diagonal |cos| = {:.3f}".format(report.max_off_diagonal))
    return report


def query_bank(queries, dim, seed):
    """Project vec256 of each query to the decoder width, one unit-norm row per query."""
    rows = _unit_rows(queries)
    projection = np.random.default_rng(seed).standard_normal((rows.shape[1], dim)) / np.sqrt(rows.shape[1])
    bank = rows @ projection
    return bank / np.linalg.norm(bank, axis=1, keepdims=True)


def save_queries(queries, fpath):
    arrays = {'vec768': np.stack([q.vec768 for q in queries]),
              'vec256': np.stack([q.vec256 for q in queries])}
    meta = {'format_version': QUERY_FORMAT_VERSION, 'kinds': [q.kind.name.lower() for q in queries],
            'seed': queries[0].seed, 'm': queries[0].m, 'embed_seed': EMBED_SEED,
            'match_seed': MATCH_SEED, 'embed_scale': EMBED_SCALE}
    write_blob(fpath, QUERIES_MAGIC, arrays, meta)
    return meta


def load_queries(fpath):
    arrays, meta = read_blob(fpath, QUERIES_MAGIC)
    if meta.get('format_version') != QUERY_FORMAT_VERSION:
        raise ValueError("query blob '{}' has format version {}, expected {}"
                         .format(fpath, meta.get('format_version'), QUERY_FORMAT_VERSION))
    return [ScatteringQuery(ScatteringKind[name.upper()], arrays['vec768'][i], arrays['vec256'][i],
                            meta['seed'], meta['m'])
            for i, name in enumerate(meta['kinds'])]
