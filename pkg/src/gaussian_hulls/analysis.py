"""Tail bounds, extreme-value statistics and the compactness check.

The tail machinery compares the Chernoff-type bound

    P{|xi| > (1 + eps) b(n)} <= C(gamma) / n^(2 gamma (1 + eps)^2),
    C(gamma) = E exp(gamma xi^2) = 1 / sqrt(1 - 2 gamma),

with the exact two-sided Gaussian tail. The bound is summable in ``n``
exactly when ``gamma (1 + eps)^2 > 1/2``.
"""

import math

import numpy as np
from scipy.special import erfc

from .construction import iter_blocks, normalizer_b
from .geometry import check_psd
from .streams import normal_block

_CHUNK = 1 << 18


def _check_gamma(gamma):
    if not 0 < gamma < 0.5:
        raise ValueError(f"gamma must lie in (0, 1/2), got {gamma!r}")


def mgf_constant(gamma):
    """``E exp(gamma xi^2)`` for a standard normal ``xi``."""
    _check_gamma(gamma)
    return 1.0 / math.sqrt(1.0 - 2.0 * gamma)


def tail_bound(n, eps, gamma):
    if n < 2:
        raise ValueError("n must be >= 2")
    if not eps > 0:
        raise ValueError("eps must be positive")
    return mgf_constant(gamma) * float(n) ** (-2.0 * gamma * (1.0 + eps) ** 2)


def gaussian_tail_exact(x):
    """``P{|xi| > x} = erfc(x / sqrt 2)``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("tail argument must be non-negative")
    out = erfc(x / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def summability_threshold(eps):
    """Smallest ``gamma`` for which the bound series converges."""
    return 0.5 / (1.0 + eps) ** 2


def tail_partial_sums(n_max, eps, gamma=None, start=2):
    """Partial sums over ``start <= n <= n_max`` of the exact tail and, if
    ``gamma`` is given, of the bound. Returns cumulative arrays indexed by n - start."""
    n = np.arange(start, n_max + 1, dtype=float)
    exact = np.cumsum(gaussian_tail_exact((1.0 + eps) * normalizer_b(n)))
    if gamma is None:
        return exact, None
    bound = np.cumsum(mgf_constant(gamma) * n ** (-2.0 * gamma * (1.0 + eps) ** 2))
    return exact, bound


def bound_tail_integral(n, eps, gamma):
    """Integral-test upper bound on ``sum_{k > n}`` of the tail bound."""
    q = 2.0 * gamma * (1.0 + eps) ** 2
    if q <= 1:
        return math.inf
    return mgf_constant(gamma) * n ** (1.0 - q) / (q - 1.0)


def gumbel_center(n):
    """Second-order location of the maximum of ``n`` standard normals."""
    b = normalizer_b(n)
    return b - (math.log(math.log(n)) + math.log(4 * math.pi)) / (2 * b)


def max_of_normals(n, seed, stream=0):
    best = -math.inf
    for start in range(1, n + 1, _CHUNK):
        count = min(_CHUNK, n + 1 - start)
        best = max(best, float(normal_block(seed, start, count, stream).max()))
    return best


def normalized_max_stat(n, seed, stream=0):
    """``max_{k <= n} xi_k / b(n)`` for the seeded stream."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return max_of_normals(n, seed, stream) / normalizer_b(n)


def ellipsoid_support(sigma, u):
    """Support of the concentration ellipsoid of ``N(0, sigma)``: ``sqrt(u' sigma u)``."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    check_psd(sigma)
    u = np.asarray(u, dtype=float)
    q = np.einsum("...i,ij,...j->...", u, sigma, u)
    out = np.sqrt(np.clip(q, 0.0, None))
    return float(out) if out.ndim == 0 else out


def violation_mask(xi, labels, radii, n, eps):
    """Which samples sit farther than ``eps`` outside ``(1 + eps) b(n) V`` along their ray.

    For ``X_n = a_k xi_n s_k`` the gauge of ``V`` along ``X_n`` is ``a_k``,
    so the excess is ``a_k (|xi_n| - (1 + eps) b(n))``.
    """
    a = radii[labels]
    excess = a * np.abs(xi) - (1.0 + eps) * normalizer_b(n) * a
    return excess > eps


def compactness_violations(spec, n_max, eps, checkpoints=()):
    """Cumulative violation counts at each checkpoint and at ``n_max``.

    Index 1 is skipped (``b(1) = 0``).
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    stops = sorted({c for c in checkpoints if 2 <= c <= n_max} | {n_max})
    counts = {}
    total = 0
    for start, _x, labels, xi in iter_blocks(spec, n_max, _CHUNK, stops):
        n = np.arange(start, start + xi.size, dtype=float)
        keep = n >= 2
        total += int(violation_mask(xi[keep], labels[keep], spec.radii, n[keep], eps).sum())
        end = start + xi.size - 1
        if end in stops:
            counts[end] = total
    return counts


def compactness_violation_count(spec, n_max, eps):
    if n_max < 2:
        return 0
    return compactness_violations(spec, n_max, eps)[n_max]
