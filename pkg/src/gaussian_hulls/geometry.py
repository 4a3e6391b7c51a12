"""Centrally symmetric convex bodies in R^d.

Each body exposes two dual oracles: the support function
``h(u) = max_{x in V} <x, u>`` and the radial gauge
``a(s) = sup{t >= 0 : t s in V}``. Support functions are evaluated row-wise,
so ``support(U)`` with ``U`` of shape ``(N, d)`` returns ``N`` values.
"""

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

REL_TOL = 1e-9
ABS_TOL = 1e-12
UNIT_TOL = 1e-9
GAUGE_BISECTION_TOL = 1e-10


class UnsupportedRepresentation(TypeError):
    """Raised when an oracle is not available for a body's representation."""


def _as_direction(u, dimension):
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != dimension:
        raise ValueError(f"expected vectors of dimension {dimension}, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("direction has non-finite components")
    return u


def _as_unit(s, dimension):
    s = _as_direction(s, dimension)
    if s.ndim != 1:
        raise ValueError("radial gauge takes a single direction")
    if abs(np.linalg.norm(s) - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must be a unit vector, got norm {np.linalg.norm(s)!r}")
    return s


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


class SymmetricConvexBody:
    """Base class; subclasses set ``dimension`` and ``circumradius``."""

    kind = None
    dimension: int
    circumradius: float

    def support(self, u):
        raise NotImplementedError

    def radial_gauge(self, s):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


class Ball(SymmetricConvexBody):
    kind = "ball"

    def __init__(self, radius=1.0, dimension=2):
        if not radius > 0 or not np.isfinite(radius):
            raise ValueError("ball radius must be a positive finite number")
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.radius = float(radius)
        self.dimension = int(dimension)
        self.circumradius = self.radius

    def support(self, u):
        u = _as_direction(u, self.dimension)
        return self.radius * np.linalg.norm(u, axis=-1)

    def radial_gauge(self, s):
        _as_unit(s, self.dimension)
        return self.radius

    def to_dict(self):
        return {"kind": "ball", "r": self.radius, "dimension": self.dimension}

    def __repr__(self):
        return f"Ball(radius={self.radius}, dimension={self.dimension})"


class Ellipsoid(SymmetricConvexBody):
    """The set ``{Sigma^{1/2} y : |y| <= 1}`` for a PSD shape matrix ``Sigma``.

    For a Gaussian covariance this is the concentration ellipsoid.
    """

    kind = "ellipsoid"

    def __init__(self, sigma):
        sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
        check_psd(sigma)
        self.sigma = _frozen(sigma)
        self.dimension = sigma.shape[0]
        evals, evecs = np.linalg.eigh(sigma)
        evals = np.clip(evals, 0.0, None)
        self.circumradius = float(np.sqrt(evals.max()))
        cutoff = ABS_TOL * max(evals.max(), 1.0)
        keep = evals > cutoff
        self._range = evecs[:, keep]
        self._pinv = (evecs[:, keep] / evals[keep]) @ evecs[:, keep].T

    def support(self, u):
        u = _as_direction(u, self.dimension)
        q = np.einsum("...i,ij,...j->...", u, self.sigma, u)
        return np.sqrt(np.clip(q, 0.0, None))

    def radial_gauge(self, s):
        s = _as_unit(s, self.dimension)
        off_range = s - self._range @ (self._range.T @ s)
        if np.linalg.norm(off_range) > UNIT_TOL:
            return 0.0
        return float(1.0 / np.sqrt(s @ self._pinv @ s))

    def to_dict(self):
        return {"kind": "ellipsoid", "sigma": self.sigma.tolist()}

    def __repr__(self):
        return f"Ellipsoid(sigma={self.sigma.tolist()})"


def check_psd(sigma):
    """Raise ValueError unless ``sigma`` is a symmetric PSD matrix."""
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] < 1:
        raise ValueError(f"shape matrix must be square, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise ValueError("shape matrix has non-finite entries")
    scale = max(np.abs(sigma).max(), 1.0)
    if np.abs(sigma - sigma.T).max() > ABS_TOL * scale:
        raise ValueError("shape matrix is not symmetric")
    if np.linalg.eigvalsh(sigma).min() < -REL_TOL * scale:
        raise ValueError("shape matrix is not positive semidefinite")


class Polytope(SymmetricConvexBody):
    """``conv{+-g_1, ..., +-g_m}``.

    Lower-dimensional polytopes (a segment in the plane, say) are handled by
    working in the linear span of the generators.
    """

    kind = "polytope"

    def __init__(self, generators):
        g = np.asarray(generators, dtype=float)
        if g.ndim == 1:
            g = g[None, :]
        if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
            raise ValueError("generators must be a non-empty list of points")
        if not np.all(np.isfinite(g)):
            raise ValueError("generators have non-finite coordinates")
        self.generators = _frozen(g)
        self.dimension = g.shape[1]
        self.circumradius = float(np.linalg.norm(g, axis=1).max())
        self._facets = None

    @classmethod
    def from_vertices(cls, vertices):
        """Build from the vertex list of a symmetric polytope (keeps one of each +-pair)."""
        v = np.asarray(vertices, dtype=float)
        keep = []
        for p in v:
            if not any(np.allclose(p, -q) or np.allclose(p, q) for q in keep):
                keep.append(p)
        return cls(keep)

    def support(self, u):
        u = _as_direction(u, self.dimension)
        return np.abs(u @ self.generators.T).max(axis=-1)

    def _span(self):
        if self._facets is None:
            if self.circumradius == 0.0:
                basis = np.zeros((0, self.dimension))
            else:
                _, sv, vt = np.linalg.svd(self.generators, full_matrices=False)
                rank = int(np.sum(sv > ABS_TOL * sv[0] * max(self.generators.shape)))
                basis = vt[:rank]
            coords = self.generators @ basis.T
            if basis.shape[0] == 0:
                ineq = None
            elif basis.shape[0] == 1:
                ineq = float(np.abs(coords).max())
            else:
                hull = ConvexHull(np.vstack([coords, -coords]))
                ineq = hull.equations
            self._facets = (basis, ineq)
        return self._facets

    def contains(self, x):
        x = _as_direction(x, self.dimension)
        basis, ineq = self._span()
        tol = ABS_TOL * max(self.circumradius, 1.0)
        y = basis @ x
        if np.linalg.norm(x - basis.T @ y) > tol:
            return False
        if basis.shape[0] == 0:
            return True
        if basis.shape[0] == 1:
            return abs(y[0]) <= ineq + tol
        return bool(np.all(ineq[:, :-1] @ y + ineq[:, -1] <= tol))

    def radial_gauge(self, s):
        s = _as_unit(s, self.dimension)
        basis, _ = self._span()
        if np.linalg.norm(s - basis.T @ (basis @ s)) > UNIT_TOL:
            return 0.0
        lo, hi = 0.0, self.circumradius
        if self.contains(hi * s):
            return hi
        while hi - lo > GAUGE_BISECTION_TOL * self.circumradius:
            mid = 0.5 * (lo + hi)
            if self.contains(mid * s):
                lo = mid
            else:
                hi = mid
        return lo

    def vertices_2d(self):
        """Counter-clockwise vertex list (d = 2 only)."""
        from .hull_engine import exact_hull_2d

        if self.dimension != 2:
            raise ValueError("vertices_2d needs a planar polytope")
        return exact_hull_2d(np.vstack([self.generators, -self.generators]))

    def to_dict(self):
        return {"kind": "polytope", "generators": self.generators.tolist()}

    def __repr__(self):
        return f"Polytope(generators={self.generators.tolist()})"


class SupportSampled(SymmetricConvexBody):
    """A body known only through support values on a set of probe directions.

    Off-probe directions are answered by the largest body consistent with
    the data, the polyhedron ``{x : <x, u_j> <= h_j for all j}``.
    """

    kind = "support-sampled"

    def __init__(self, directions, values):
        u = np.atleast_2d(np.asarray(directions, dtype=float))
        h = np.asarray(values, dtype=float)
        if h.shape != (u.shape[0],):
            raise ValueError("need one support value per probe direction")
        self.directions = _frozen(u / np.linalg.norm(u, axis=1, keepdims=True))
        self.values = _frozen(h)
        self.dimension = u.shape[1]
        self.circumradius = float(np.abs(h).max())

    def _support_one(self, u):
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        hit = np.flatnonzero(np.abs(self.directions @ (u / norm) - 1.0) <= ABS_TOL)
        if hit.size:
            return float(self.values[hit[0]] * norm)
        res = linprog(-u, A_ub=self.directions, b_ub=self.values,
                      bounds=[(None, None)] * self.dimension, method="highs")
        if res.status != 0:
            raise ValueError("probe constraints do not bound the body in this direction")
        return float(-res.fun)

    def support(self, u):
        u = _as_direction(u, self.dimension)
        if u.ndim == 1:
            return self._support_one(u)
        return np.array([self._support_one(row) for row in u])

    def radial_gauge(self, s):
        raise UnsupportedRepresentation(
            "radial gauge needs a membership test; support-sampled bodies have none"
        )

    def to_dict(self):
        return {"kind": "support-sampled", "directions": self.directions.tolist(),
                "values": self.values.tolist()}


def segment(a, b=None):
    """The symmetric segment ``[-a, a]``; with two endpoints, they must be opposite."""
    a = np.asarray(a, dtype=float)
    if b is not None and not np.allclose(np.asarray(b, dtype=float), -a):
        raise ValueError("only segments symmetric about the origin are supported")
    return Polytope([a])


def square(half_width=1.0):
    return Polytope([[half_width, half_width], [half_width, -half_width]])


def diamond(radius=1.0):
    return Polytope([[radius, 0.0], [0.0, radius]])


def regular_polygon(k, radius=1.0, phase=0.0):
    """Regular ``2k``-gon inscribed in the circle of the given radius."""
    angles = phase + np.pi * np.arange(k) / k
    return Polytope(radius * np.column_stack([np.cos(angles), np.sin(angles)]))


def body_from_dict(spec, dimension=None):
    """Build a body from its config form: ``{"kind": "ball", "r": 1}``, etc."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("body description needs a 'kind' tag")
    kind = spec["kind"]
    if kind == "ball":
        return Ball(spec.get("r", 1.0), spec.get("dimension", dimension or 2))
    if kind == "ellipsoid":
        return Ellipsoid(spec["sigma"])
    if kind == "polytope":
        return Polytope(spec["generators"])
    if kind == "support-sampled":
        return SupportSampled(spec["directions"], spec["values"])
    raise ValueError(f"unknown body kind {kind!r}")


class ProbeSet:
    """Unit probe directions ``u_1, ..., u_D`` standing in for the dual sphere."""

    def __init__(self, directions):
        u = np.atleast_2d(np.asarray(directions, dtype=float))
        if u.shape[0] == 0:
            raise ValueError("probe set is empty")
        norms = np.linalg.norm(u, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValueError("probe directions must be unit vectors")
        self.directions = _frozen(u)

    @property
    def dimension(self):
        return self.directions.shape[1]

    def __len__(self):
        return self.directions.shape[0]

    @classmethod
    def uniform(cls, dimension, count=None, seed=0):
        """Default probes: two in d = 1, equally spaced angles in d = 2,
        a Fibonacci lattice in d = 3 and normalized Gaussian draws beyond."""
        if dimension == 1:
            return cls([[1.0], [-1.0]])
        if count is None:
            count = 256 if dimension == 2 else 1024
        if count < 2 * dimension:
            raise ValueError(f"need at least {2 * dimension} probes in dimension {dimension}")
        if dimension == 2:
            theta = 2 * np.pi * np.arange(count) / count
            return cls(np.column_stack([np.cos(theta), np.sin(theta)]))
        if dimension == 3:
            i = np.arange(count) + 0.5
            z = 1 - 2 * i / count
            r = np.sqrt(1 - z * z)
            phi = np.pi * (1 + 5**0.5) * i
            u = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
            return cls(u / np.linalg.norm(u, axis=1, keepdims=True))
        from .streams import normal_block

        g = normal_block(seed, 0, count * dimension, stream=0x9E0B).reshape(count, dimension)
        return cls(g / np.linalg.norm(g, axis=1, keepdims=True))


def support_values(body, probes):
    """Support of ``body`` at every probe direction."""
    return np.asarray(body.support(probes.directions), dtype=float)


def support(body, u):
    return body.support(u)


def radial_gauge(body, s):
    return body.radial_gauge(s)


def hausdorff_estimate(a, b, probes):
    """``max_j |h_A(u_j) - h_B(u_j)|``; never exceeds the true Hausdorff distance."""
    if len(probes) == 0:
        raise ValueError("probe set is empty")
    if a.dimension != b.dimension or a.dimension != probes.dimension:
        raise ValueError("dimension mismatch")
    return float(np.abs(support_values(a, probes) - support_values(b, probes)).max())


def merge_support(h_a, h_b):
    """Support of ``conv(A u B)`` from the supports of ``A`` and ``B``."""
    h_a = np.asarray(h_a, dtype=float)
    h_b = np.asarray(h_b, dtype=float)
    if h_a.shape != h_b.shape:
        raise ValueError(f"support tables differ in shape: {h_a.shape} vs {h_b.shape}")
    return np.maximum(h_a, h_b)


def excess_along_ray(x, c, body):
    """How far ``x`` sticks out of ``c * body`` along its own ray.

    Returns ``max(0, |x| - c a(x/|x|))``: the distance from ``x`` to the
    diameter segment of ``c * body`` through ``x``, which bounds
    ``dist(x, c * body)`` from above.
    """
    if not c > 0:
        raise ValueError("scale c must be positive")
    x = _as_direction(x, body.dimension)
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        return 0.0
    return max(0.0, norm - c * body.radial_gauge(x / norm))
