"""The line-supported Gaussian sequence whose normalized hulls converge to V.

Indices ``n = 1, 2, ...`` are dealt into classes ``k = 0..m-1`` by a greedy
quota rule with densities ``p_k``. A sample in class ``k`` is
``X_n = a_k xi_n s_k`` where ``s_k`` is a unit direction, ``a_k`` the radial
gauge of the target body along it and ``xi_n`` a standard normal deviate
keyed by ``(seed, n)``.

Class labels are 0-based throughout.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np

from .geometry import Polytope, SymmetricConvexBody
from .streams import normal_block

DENSITY_TOL = 1e-12
# deficits within this of the maximum count as tied; lowest index wins
TIE_TOL = 1e-9


def normalizer_b(t):
    """``sqrt(2 ln t)``, the scale of the maximum of ``t`` standard normals."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 1):
        raise ValueError("normalizer is defined for t > 1 only")
    out = np.sqrt(2.0 * np.log(t))
    return float(out) if out.ndim == 0 else out


def check_densities(densities):
    p = np.asarray(densities, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("densities must be a non-empty list")
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise ValueError("every density must be positive")
    if abs(p.sum() - 1.0) > DENSITY_TOL * p.size:
        raise ValueError(f"densities must sum to 1, got {p.sum()!r}")
    return p


def uniform_densities(m):
    return np.full(m, 1.0 / m)


class PartitionScheme:
    """Sequential greedy-deficit partition of the positive integers.

    Index ``n + 1`` goes to the class maximizing ``p_k (n + 1) - c_k``, where
    ``c_k`` counts the indices already assigned to class ``k``.
    """

    def __init__(self, densities):
        self.densities = check_densities(densities)
        self._p = [float(x) for x in self.densities]
        self.counts = [0] * len(self._p)
        self.n = 0

    def assign_class(self):
        nxt = self.n + 1
        deficits = [p * nxt - c for p, c in zip(self._p, self.counts)]
        best = max(deficits)
        k = next(i for i, d in enumerate(deficits) if d >= best - TIE_TOL)
        self.counts[k] += 1
        self.n = nxt
        return k

    def discrepancy(self):
        return max(abs(c - self.n * p) for c, p in zip(self.counts, self._p))


@numba.njit(cache=True)
def _greedy_labels(p, n):
    m = p.shape[0]
    counts = np.zeros(m, dtype=np.int64)
    labels = np.empty(n, dtype=np.int64)
    deficits = np.empty(m)
    for i in range(n):
        nxt = i + 1
        best = -np.inf
        for k in range(m):
            deficits[k] = p[k] * nxt - counts[k]
            if deficits[k] > best:
                best = deficits[k]
        for k in range(m):
            if deficits[k] >= best - 1e-9:
                labels[i] = k
                counts[k] += 1
                break
    return labels


@lru_cache(maxsize=16)
def _labels_cached(p, n):
    labels = _greedy_labels(np.array(p, dtype=float), n)
    labels.flags.writeable = False
    return labels


def class_labels(densities, n):
    """Labels of indices ``1..n``; the same sequence ``PartitionScheme`` yields."""
    p = check_densities(densities)
    return _labels_cached(tuple(float(x) for x in p), int(n))


def count_discrepancy(labels, densities, checkpoints):
    """``max_k |c_k(n) - n p_k|`` at each checkpoint ``n``."""
    p = np.asarray(densities, dtype=float)
    out = []
    for n in checkpoints:
        counts = np.bincount(labels[:n], minlength=p.size)
        out.append(float(np.abs(counts - n * p).max()))
    return out


def max_discrepancy_trace(labels, densities):
    """``max_k |c_k(n) - n p_k|`` for every ``n`` from 1 to ``len(labels)``."""
    p = np.asarray(densities, dtype=float)
    n = np.arange(1, labels.size + 1)
    worst = np.zeros(labels.size)
    for k in range(p.size):
        counts = np.cumsum(labels == k)
        np.maximum(worst, np.abs(counts - n * p[k]), out=worst)
    return worst


def direction_sequence(dimension, m, mode="uniform-angles-2d", seed=0, explicit=None):
    """``m`` unit directions.

    Modes: ``"explicit"`` (validated, not renormalized), ``"uniform-angles-2d"``
    (angles ``pi k / m``, a half circle suffices by symmetry),
    ``"full-angles-2d"`` (angles ``2 pi k / m``) and ``"seeded-quasi-uniform"``
    (normalized Gaussian draws from the seeded stream).
    """
    if m < 1:
        raise ValueError("need at least one direction")
    if mode == "explicit":
        s = np.atleast_2d(np.asarray(explicit, dtype=float))
        if s.shape != (m, dimension):
            raise ValueError(f"expected {m} directions of dimension {dimension}, got {s.shape}")
        if np.any(np.abs(np.linalg.norm(s, axis=1) - 1.0) > 1e-12):
            raise ValueError("explicit directions must be unit vectors")
        return s
    if mode in ("uniform-angles-2d", "full-angles-2d"):
        if dimension != 2:
            raise ValueError(f"{mode} needs dimension 2")
        span = np.pi if mode == "uniform-angles-2d" else 2 * np.pi
        theta = span * np.arange(m) / m
        return np.column_stack([np.cos(theta), np.sin(theta)])
    if mode == "seeded-quasi-uniform":
        if dimension == 1:
            return np.ones((m, 1))
        g = normal_block(seed, 0, m * dimension, stream=0xD1).reshape(m, dimension)
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    raise ValueError(f"unknown direction mode {mode!r}")


@dataclass(frozen=True)
class ConstructionSpec:
    directions: np.ndarray
    radii: np.ndarray
    densities: np.ndarray
    seed: int = 0
    stream: int = field(default=0, compare=False)

    @property
    def dimension(self):
        return self.directions.shape[1]

    @property
    def m(self):
        return self.directions.shape[0]

    @property
    def variances(self):
        return self.radii**2

    @property
    def max_second_moment(self):
        """``sup_n E|X_n|^2``."""
        return float(self.variances.max())

    def with_seed(self, seed):
        return ConstructionSpec(self.directions, self.radii, self.densities, int(seed), self.stream)


def build_spec(body: SymmetricConvexBody, directions, densities="uniform", seed=0):
    s = np.array(np.atleast_2d(directions), dtype=float)
    if s.shape[1] != body.dimension:
        raise ValueError("directions and body differ in dimension")
    if np.any(np.abs(np.linalg.norm(s, axis=1) - 1.0) > 1e-12):
        raise ValueError("directions must be unit vectors")
    if isinstance(densities, str):
        if densities != "uniform":
            raise ValueError(f"unknown density preset {densities!r}")
        p = uniform_densities(s.shape[0])
    else:
        p = check_densities(densities).copy()
        if p.size != s.shape[0]:
            raise ValueError("need one density per direction")
    radii = np.array([body.radial_gauge(row) for row in s])
    for arr in (s, radii, p):
        arr.flags.writeable = False
    return ConstructionSpec(s, radii, p, int(seed))


def truncated_target(spec):
    """``V_m = conv{+-a_k s_k}``, the exact limit of the finite construction."""
    points = spec.radii[:, None] * spec.directions
    nonzero = np.linalg.norm(points, axis=1) > 0
    if not nonzero.any():
        return Polytope(np.zeros((1, spec.dimension)))
    return Polytope(points[nonzero])


def sample_block(spec, start, count, labels=None):
    """Samples ``X_start .. X_{start+count-1}`` (1-based indices) and their labels.

    ``labels`` may be a precomputed label array for indices ``1..N``.
    """
    if start < 1:
        raise ValueError("sample indices start at 1")
    if labels is None:
        labels = class_labels(spec.densities, start + count - 1)
    k = labels[start - 1:start - 1 + count]
    if k.size != count:
        raise ValueError("label array too short for the requested block")
    xi = normal_block(spec.seed, start, count, spec.stream)
    x = (spec.radii[k] * xi)[:, None] * spec.directions[k]
    return x, k, xi


def draw_sample(spec, n, scheme):
    """Draw ``X_n``, advancing ``scheme`` by one index."""
    if n != scheme.n + 1:
        raise ValueError(f"scheme is at index {scheme.n}; cannot draw X_{n}")
    k = scheme.assign_class()
    xi = normal_block(spec.seed, n, 1, spec.stream)[0]
    return (spec.radii[k] * xi) * spec.directions[k]


def iter_blocks(spec, n_max, chunk=1 << 16, stops=()):
    """Yield ``(start, X, labels, xi)`` blocks covering ``1..n_max``.

    Blocks never straddle a value in ``stops``, so callers can take
    checkpoint snapshots after the block ending there.
    """
    labels = class_labels(spec.densities, n_max)
    bounds = sorted({int(s) for s in stops if 1 <= s < n_max} | {n_max})
    start = 1
    for stop in bounds:
        while start <= stop:
            count = min(chunk, stop - start + 1)
            x, k, xi = sample_block(spec, start, count, labels)
            yield start, x, k, xi
            start += count

