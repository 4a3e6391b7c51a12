import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from gaussian_hulls.geometry import Ball, Ellipsoid, Polytope


def sign_pattern_support(generators, u):
    """Brute force: max of <+-g_i, u> over every sign pattern of every generator."""
    g = np.asarray(generators, dtype=float)
    best = -np.inf
    for signs in itertools.product((-1.0, 1.0), repeat=len(g)):
        for i, s in enumerate(signs):
            best = max(best, s * float(np.dot(g[i], u)))
    return best


def brute_force_hull_vertices(points):
    """O(n^3) oracle: endpoints of every pair with all other points strictly left
    of (or on) the directed segment."""
    p = np.asarray(points, dtype=float)
    n = len(p)
    vertices = set()
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = p[j] - p[i]
            cross = d[0] * (p[:, 1] - p[i, 1]) - d[1] * (p[:, 0] - p[i, 0])
            cross[[i, j]] = 1.0
            if np.all(cross > 0):
                vertices.add(i)
                vertices.add(j)
    return p[sorted(vertices)]


@pytest.fixture
def square():
    return Polytope([[1, 1], [1, -1]])


@pytest.fixture
def diamond():
    return Polytope([[1, 0], [0, 1]])


finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@st.composite
def bodies_2d(draw):
    kind = draw(st.sampled_from(["ball", "ellipsoid", "polytope"]))
    if kind == "ball":
        return Ball(draw(st.floats(0.1, 5)), 2)
    if kind == "ellipsoid":
        a = np.array(draw(st.lists(finite, min_size=4, max_size=4))).reshape(2, 2)
        return Ellipsoid(a @ a.T + 0.05 * np.eye(2))
    m = draw(st.integers(1, 6))
    g = np.array(draw(st.lists(finite, min_size=2 * m, max_size=2 * m))).reshape(m, 2)
    if np.linalg.norm(g) < 1e-3:
        g[0] = [1.0, 0.0]
    return Polytope(g)


@st.composite
def unit_vectors_2d(draw):
    theta = draw(st.floats(0, 2 * np.pi))
    return np.array([np.cos(theta), np.sin(theta)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_RESULTS
    except ImportError:
        return
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
