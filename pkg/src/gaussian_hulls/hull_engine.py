"""Streaming support functions of growing convex hulls, plus exact 2D hulls.

The accumulator never stores the hull itself: it keeps, for each probe
direction ``u_j``, the running maximum ``h_j = max_k <X_k, u_j>``. That is
the support function of ``conv{X_1, ..., X_n}`` restricted to the probes and
costs O(D) memory however many samples arrive.

Inner products go through :func:`project`, a plain elementwise sum over
coordinates. Using one routine everywhere keeps the streaming maxima and
the exact-hull oracle bitwise comparable.
"""

from dataclasses import dataclass

import numpy as np

from .construction import normalizer_b
from .geometry import ProbeSet, support_values

_PROJECT_CELLS = 1 << 22
# headroom for rounding in <x, u> when skipping points by norm
_NORM_SLACK = 1e-9


def project(points, directions):
    """``<x_i, u_j>`` for every point/direction pair, shape ``(N, D)``."""
    points = np.asarray(points, dtype=float)
    directions = np.asarray(directions, dtype=float)
    out = points[:, 0, None] * directions[None, :, 0]
    for i in range(1, points.shape[1]):
        out += points[:, i, None] * directions[None, :, i]
    return out


def max_projection(points, directions):
    """Column-wise ``max_i <x_i, u_j>``, computed in row blocks."""
    rows = max(1, _PROJECT_CELLS // max(1, directions.shape[0]))
    best = np.full(directions.shape[0], -np.inf)
    for i in range(0, points.shape[0], rows):
        np.maximum(best, project(points[i:i + rows], directions).max(axis=0), out=best)
    return best


@dataclass(frozen=True)
class Polygon2D:
    """Counter-clockwise vertices of a convex polygon (1-2 rows when degenerate)."""

    vertices: np.ndarray

    def __len__(self):
        return self.vertices.shape[0]

    def is_strictly_convex(self):
        v = self.vertices
        if len(v) < 3:
            return True
        a, b, c = v, np.roll(v, -1, axis=0), np.roll(v, -2, axis=0)
        return bool(np.all(_cross(a, b, c) > 0))

    def scaled(self, factor):
        return Polygon2D(self.vertices * factor)

    def inradius(self):
        """Distance from the origin to the boundary, 0 unless the origin is inside."""
        v = self.vertices
        if len(v) < 3:
            return 0.0
        a, b = v, np.roll(v, -1, axis=0)
        edge = b - a
        # signed distance of the origin to each edge line, positive inside
        dist = (edge[:, 0] * -a[:, 1] - edge[:, 1] * -a[:, 0]) / np.linalg.norm(edge, axis=1)
        return float(max(dist.min(), 0.0))


def _cross(o, a, b):
    return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (a[..., 1] - o[..., 1]) * (b[..., 0] - o[..., 0])


def _discard_interior(pts):
    """Drop points strictly inside the polygon spanned by 8 extreme points."""
    theta = np.pi * np.arange(8) / 4
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    extreme = np.unique(pts[np.argmax(project(pts, dirs), axis=0)], axis=0)
    if extreme.shape[0] < 3:
        return pts
    order = np.argsort(np.arctan2(*(extreme - extreme.mean(axis=0)).T[::-1]))
    ring = extreme[order]
    a, b = ring, np.roll(ring, -1, axis=0)
    scale = np.abs(pts).max() ** 2
    margin = 1e-9 * scale
    strictly_in = np.all(_cross(a[None], b[None], pts[:, None, :]) > margin, axis=1)
    return pts[~strictly_in]


def exact_hull_2d(points):
    """Convex hull by Andrew's monotone chain; collinear boundary points are dropped."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("need at least one point")
    if pts.shape[0] > 64:
        pts = _discard_interior(pts)
    pts = np.unique(pts, axis=0)  # lexicographic sort, duplicates removed
    if pts.shape[0] <= 2:
        return Polygon2D(pts)

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                o, a = out[-2], out[-1]
                if (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0]) > 0:
                    break
                out.pop()
            out.append(p)
        return out

    rows = [tuple(p) for p in pts]
    lower = chain(rows)
    upper = chain(reversed(rows))
    hull = lower[:-1] + upper[:-1]
    return Polygon2D(np.array(hull, dtype=float))


def polygon_support(poly, u):
    u = np.asarray(u, dtype=float)
    if len(poly) == 0:
        raise ValueError("empty polygon")
    vals = project(poly.vertices, np.atleast_2d(u)).max(axis=0)
    return float(vals[0]) if u.ndim == 1 else vals


def _point_segment_distance(p, a, b):
    ab = b - a
    denom = np.einsum("...i,...i->...", ab, ab)
    t = np.where(denom > 0, np.einsum("...i,...i->...", p - a, ab) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.linalg.norm(p - (a + t[..., None] * ab), axis=-1)


def distance_to_polygon(points, poly):
    """Euclidean distance from each point to the (filled) convex polygon."""
    p = np.atleast_2d(np.asarray(points, dtype=float))
    v = poly.vertices
    if len(v) == 1:
        return np.linalg.norm(p - v[0], axis=1)
    if len(v) == 2:
        return _point_segment_distance(p, v[0], v[1])
    a, b = v, np.roll(v, -1, axis=0)
    d = _point_segment_distance(p[:, None, :], a[None], b[None])
    inside = np.all(_cross(a[None], b[None], p[:, None, :]) >= 0, axis=1)
    return np.where(inside, 0.0, d.min(axis=1))


def exact_hausdorff_2d(poly_a, poly_b):
    """Hausdorff distance between two convex polygons.

    The farthest point of a convex polygon from a convex set is a vertex, so
    vertex-to-polygon distances in both directions suffice.
    """
    if len(poly_a) == 0 or len(poly_b) == 0:
        raise ValueError("empty polygon")
    return float(max(distance_to_polygon(poly_a.vertices, poly_b).max(),
                     distance_to_polygon(poly_b.vertices, poly_a).max()))


class SupportAccumulator:
    """Running per-probe maxima of ``<X_k, u_j>`` over a sample stream.

    With ``retain_hull=True`` (d = 2 only) the exact hull vertices are kept
    as well, so the primal hull can be checked against the dual values.
    """

    def __init__(self, probes: ProbeSet, retain_hull=False):
        if retain_hull and probes.dimension != 2:
            raise ValueError("hull retention is only available in d = 2")
        self.probes = probes
        self.h = np.full(len(probes), -np.inf)
        self.n = 0
        self.retain_hull = retain_hull
        self._hull = None

    @property
    def dimension(self):
        return self.probes.dimension

    def ingest(self, x):
        self.ingest_many(np.asarray(x, dtype=float)[None, :])
        return self

    def ingest_many(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise ValueError(f"expected points of shape (N, {self.dimension}), got {pts.shape}")
        if pts.shape[0] == 0:
            return self
        self.n += pts.shape[0]
        norms = np.sqrt(np.einsum("ij,ij->i", pts, pts))
        # a point shorter than every current h_j cannot raise any of them
        floor = self.h.min()
        cand = pts[norms * (1 + _NORM_SLACK) >= floor] if floor > 0 else pts
        if cand.shape[0]:
            np.maximum(self.h, max_projection(cand, self.probes.directions), out=self.h)
        if self.retain_hull:
            self._update_hull(pts, norms)
        return self

    def _update_hull(self, pts, norms):
        if self._hull is None:
            self._hull = exact_hull_2d(pts)
            return
        r_in = self._hull.inradius()
        outside = pts[norms >= r_in * (1 - _NORM_SLACK)]
        if outside.shape[0]:
            self._hull = exact_hull_2d(np.vstack([self._hull.vertices, outside]))

    def hull(self):
        if not self.retain_hull:
            raise ValueError("accumulator was built without hull retention")
        if self._hull is None:
            raise ValueError("no samples ingested yet")
        return self._hull

    def merge(self, other):
        """Accumulator of the union of both sample streams."""
        if other.probes is not self.probes and not np.array_equal(
                other.probes.directions, self.probes.directions):
            raise ValueError("cannot merge accumulators over different probe sets")
        out = SupportAccumulator(self.probes, self.retain_hull and other.retain_hull)
        out.h = np.maximum(self.h, other.h)
        out.n = self.n + other.n
        if out.retain_hull:
            parts = [p._hull.vertices for p in (self, other) if p._hull is not None]
            out._hull = exact_hull_2d(np.vstack(parts)) if parts else None
        return out

    def copy(self):
        out = SupportAccumulator(self.probes, self.retain_hull)
        out.h = self.h.copy()
        out.n = self.n
        out._hull = self._hull
        return out


def normalized_support(acc):
    """``M_n(u_j) = h_j / b(n)``."""
    if acc.n < 2:
        raise ValueError("normalized support needs n >= 2 samples")
    return acc.h / normalizer_b(acc.n)


def support_error(acc, target):
    """Signed per-probe error ``M_n(u_j) - h_target(u_j)``."""
    if target.dimension != acc.dimension:
        raise ValueError("dimension mismatch between accumulator and target")
    return normalized_support(acc) - support_values(target, acc.probes)


def sup_error(acc, target):
    """Probe estimate (a lower bound) of the Hausdorff distance from ``W_n / b(n)`` to ``target``."""
    return float(np.abs(support_error(acc, target)).max())


def write_hull_csv(path, poly):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for x, y in poly.vertices:
            writer.writerow([repr(float(x)), repr(float(y))])
