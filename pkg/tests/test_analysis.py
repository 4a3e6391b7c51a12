import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from gaussian_hulls.analysis import (
    bound_tail_integral,
    compactness_violation_count,
    compactness_violations,
    ellipsoid_support,
    gaussian_tail_exact,
    gumbel_center,
    max_of_normals,
    mgf_constant,
    normalized_max_stat,
    summability_threshold,
    tail_bound,
    tail_partial_sums,
    violation_mask,
)
from gaussian_hulls.construction import build_spec, direction_sequence, normalizer_b, sample_block
from gaussian_hulls.geometry import Ball, Polytope, excess_along_ray
from gaussian_hulls.streams import normal_block


def mgf_quadrature(gamma):
    f = lambda t: math.exp(gamma * t * t - t * t / 2) / math.sqrt(2 * math.pi)  # noqa: E731
    return integrate.quad(f, -np.inf, np.inf, epsabs=0, epsrel=1e-13)[0]


def tail_quadrature(x):
    mpmath.mp.dps = 40
    val = 2 * mpmath.quad(lambda t: mpmath.exp(-t * t / 2) / mpmath.sqrt(2 * mpmath.pi), [x, mpmath.inf])
    return float(val)


class TestMgf:
    def test_small_gamma(self):
        assert mgf_constant(1e-9) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("gamma,value", [(0.25, 1.41421356), (0.45, 3.16227766)])
    def test_spot_values(self, gamma, value):
        oracle = mgf_quadrature(gamma)
        assert oracle == pytest.approx(value, abs=1e-8)
        assert mgf_constant(gamma) == pytest.approx(oracle, rel=1e-8)

    @pytest.mark.parametrize("gamma", [0.05, 0.1, 0.2, 0.3, 0.4, 0.45])
    def test_grid(self, gamma):
        assert mgf_constant(gamma) == pytest.approx(mgf_quadrature(gamma), rel=1e-8)

    @pytest.mark.parametrize("gamma", [0, 0.5, -0.1, 0.7])
    def test_domain(self, gamma):
        with pytest.raises(ValueError):
            mgf_constant(gamma)


class TestTailBound:
    def test_spot(self):
        direct = 3.16227766 / 100 ** (2 * 0.45 * 1.1**2)
        assert tail_bound(100, 0.1, 0.45) == pytest.approx(direct, rel=1e-8)
        assert tail_bound(100, 0.1, 0.45) == pytest.approx(0.02099, abs=1e-4)

    def test_decreasing_in_n(self):
        vals = [tail_bound(n, 0.1, 0.4) for n in (2, 10, 100, 10**4, 10**6)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_summable_partial_sums(self):
        eps, gamma = 0.1, 0.45
        assert gamma > summability_threshold(eps)
        _, bound = tail_partial_sums(10**6, eps, gamma)
        for n in (10**3, 10**4, 10**5):
            increment = bound[-1] - bound[n - 2]
            # integral test: the remaining mass after n is below the integral from n
            assert increment <= bound_tail_integral(n, eps, gamma)
        assert bound[-1] - bound[10**5 - 2] < bound[10**5 - 2] - bound[10**3 - 2]

    def test_divergent_side(self):
        assert bound_tail_integral(100, 0.05, 0.3) == math.inf

    def test_domain(self):
        with pytest.raises(ValueError):
            tail_bound(1, 0.1, 0.4)
        with pytest.raises(ValueError):
            tail_bound(10, 0.0, 0.4)


class TestExactTail:
    def test_zero(self):
        assert gaussian_tail_exact(0.0) == 1.0

    def test_spot(self):
        x = 1.1 * normalizer_b(100)
        assert x == pytest.approx(3.33834, abs=1e-5)
        oracle = tail_quadrature(x)
        assert oracle == pytest.approx(8.43e-4, abs=1e-6)
        assert gaussian_tail_exact(x) == pytest.approx(oracle, rel=1e-10)

    @pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.0, 3.5, 5.0, 6.5, 8.0])
    def test_relative_accuracy(self, x):
        assert gaussian_tail_exact(x) == pytest.approx(tail_quadrature(x), rel=1e-10)

    def test_negative(self):
        with pytest.raises(ValueError):
            gaussian_tail_exact(-0.1)

    @pytest.mark.parametrize("n", [10, 100, 10**3, 10**4, 10**5, 10**6])
    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
    @pytest.mark.parametrize("gamma", [0.3, 0.4, 0.45])
    def test_bound_dominates(self, n, eps, gamma):
        assert gaussian_tail_exact((1 + eps) * normalizer_b(n)) <= tail_bound(n, eps, gamma)

    def test_exact_partial_sums_converge(self):
        # terms decay like n^-(1+eps)^2 up to a log factor, so decade increments shrink
        exact, _ = tail_partial_sums(10**6, 0.1)
        at = lambda n: exact[n - 2]  # noqa: E731
        decades = [at(10 ** (j + 1)) - at(10**j) for j in range(2, 6)]
        assert all(b < a for a, b in zip(decades, decades[1:]))
        assert decades[-1] / decades[-2] < 10 ** -0.2

    def test_exact_partial_sum_increment_oracle(self):
        # Euler-Maclaurin: sum over (a, b] ~ integral over [a, b] + (f(b) - f(a)) / 2
        f = lambda t: math.erfc(1.1 * math.sqrt(2 * math.log(t)) / math.sqrt(2))  # noqa: E731
        a, b = 10**5, 10**6
        oracle = integrate.quad(f, a, b, epsrel=1e-13, limit=200)[0] + (f(b) - f(a)) / 2
        assert oracle == pytest.approx(0.0228514318, abs=1e-10)
        exact, _ = tail_partial_sums(b, 0.1)
        assert exact[-1] - exact[a - 2] == pytest.approx(oracle, rel=1e-8)


class TestExtremes:
    def test_gumbel_center(self):
        n = 10**6
        b = float(mpmath.sqrt(2 * mpmath.log(n)))
        oracle = (b - (math.log(math.log(n)) + math.log(4 * math.pi)) / (2 * b)) / b
        assert gumbel_center(n) / normalizer_b(n) == pytest.approx(oracle, rel=1e-12)
        assert oracle == pytest.approx(0.907, abs=1e-3)

    def test_ratio_of_normalizers(self):
        # b(n p) / b(n) -> 1 slowly; direct high-precision value at n = 1e6, p = 1/8
        oracle = float(mpmath.sqrt(mpmath.log(125000) / mpmath.log(10**6)))
        assert normalizer_b(125000) / normalizer_b(10**6) == pytest.approx(oracle, rel=1e-12)
        assert oracle == pytest.approx(0.92168, abs=1e-5)

    def test_stat_matches_direct_max(self):
        z = normal_block(13, 1, 5000)
        assert normalized_max_stat(5000, 13) == z.max() / normalizer_b(5000)

    def test_stat_chunk_invariance(self):
        n = 700_000
        assert max_of_normals(n, 2) == float(normal_block(2, 1, n).max())

    def test_drift(self):
        seeds = range(50)
        small = np.median([normalized_max_stat(10**3, s) for s in seeds])
        large = np.median([normalized_max_stat(10**5, s) for s in seeds])
        assert small < large < 1.0


class TestEllipsoidSupport:
    def test_identity(self):
        for t in np.linspace(0, 2 * np.pi, 13):
            assert ellipsoid_support(np.eye(2), [math.cos(t), math.sin(t)]) == pytest.approx(1.0)

    def test_diag(self):
        assert ellipsoid_support(np.diag([4.0, 1.0]), [1, 0]) == pytest.approx(2.0)

    def test_zero(self):
        assert ellipsoid_support(np.diag([4.0, 1.0]), [0, 0]) == 0.0

    def test_asymmetric(self):
        with pytest.raises(ValueError):
            ellipsoid_support([[1, 0.5], [0, 1]], [1, 0])

    def test_axioms(self):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(3, 3))
        sigma = a @ a.T
        for _ in range(100):
            u, v = rng.normal(size=3), rng.normal(size=3)
            lam = rng.uniform(0.1, 10)
            h = lambda w: ellipsoid_support(sigma, w)  # noqa: E731
            assert h(-u) == pytest.approx(h(u), rel=1e-12)
            assert h(lam * u) == pytest.approx(lam * h(u), rel=1e-12)
            assert h(u + v) <= h(u) + h(v) + 1e-12

    def test_marginal_monte_carlo(self):
        # the normalized maximum of N(0, 4) along the x-axis tends to sigma = 2
        z = normal_block(4, 1, 10**6)
        ratio = 2 * z.max() / normalizer_b(10**6)
        assert ratio == pytest.approx(ellipsoid_support(np.diag([4.0, 1.0]), [1, 0]), abs=0.2)


class TestViolations:
    def test_mask_matches_excess_along_ray(self):
        body = Polytope([[1, 1], [1, -1]])
        spec = build_spec(body, direction_sequence(2, 8, "full-angles-2d"), seed=3)
        x, k, xi = sample_block(spec, 2, 3000)
        n = np.arange(2, 3002, dtype=float)
        eps = 0.05
        mask = violation_mask(xi, k, spec.radii, n, eps)
        direct = np.array([excess_along_ray(xx, (1 + eps) * normalizer_b(nn), body) > eps
                           for xx, nn in zip(x, n)])
        assert mask.any()
        assert np.array_equal(mask, direct)

    def test_scalar_oracle_one_dimensional(self):
        spec = build_spec(Polytope([[1.0]]), [[1.0]], seed=17)
        eps = 0.05
        n_max = 20_000
        xi = normal_block(17, 2, n_max - 1)
        n = np.arange(2, n_max + 1)
        expected = int(np.sum(np.abs(xi) > (1 + eps) * normalizer_b(n) + eps))
        assert compactness_violation_count(spec, n_max, eps) == expected

    def test_counts_nondecreasing(self):
        spec = build_spec(Ball(1.0), direction_sequence(2, 4), seed=1)
        counts = compactness_violations(spec, 10**5, 0.01, checkpoints=[10, 100, 1000, 10**4])
        vals = [counts[c] for c in sorted(counts)]
        assert vals == sorted(vals)

    def test_huge_eps(self):
        spec = build_spec(Ball(1.0), direction_sequence(2, 4), seed=1)
        assert compactness_violation_count(spec, 10**5, 10.0) == 0
