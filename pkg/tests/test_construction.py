import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from gaussian_hulls.construction import (
    PartitionScheme,
    build_spec,
    class_labels,
    count_discrepancy,
    direction_sequence,
    draw_sample,
    iter_blocks,
    max_discrepancy_trace,
    normalizer_b,
    sample_block,
    truncated_target,
)
from gaussian_hulls.geometry import Ball, Polytope, ProbeSet, regular_polygon, support_values


def greedy_oracle(p, n):
    """Greedy largest-deficit rule in exact rational arithmetic; 1-based labels."""
    p = [Fraction(x).limit_denominator(10**6) for x in p]
    counts = [0] * len(p)
    out = []
    for i in range(1, n + 1):
        deficits = [pk * i - c for pk, c in zip(p, counts)]
        k = deficits.index(max(deficits))
        counts[k] += 1
        out.append(k + 1)
    return out, counts


class TestNormalizer:
    def test_values(self):
        assert normalizer_b(math.e) == pytest.approx(math.sqrt(2), rel=1e-15)
        assert normalizer_b(math.e**2) == pytest.approx(2.0, rel=1e-15)
        oracle = float(mpmath.sqrt(2 * mpmath.log(100)))
        assert oracle == pytest.approx(3.03485425, abs=1e-8)
        assert normalizer_b(100) == pytest.approx(oracle, rel=1e-14)

    @pytest.mark.parametrize("t", [1, 0.5, -3])
    def test_domain(self, t):
        with pytest.raises(ValueError):
            normalizer_b(t)


class TestPartition:
    def test_single_class(self):
        scheme = PartitionScheme([1.0])
        assert [scheme.assign_class() for _ in range(10)] == [0] * 10

    def test_halves_alternate(self):
        oracle, _ = greedy_oracle([0.5, 0.5], 6)
        assert oracle == [1, 2, 1, 2, 1, 2]
        scheme = PartitionScheme([0.5, 0.5])
        assert [scheme.assign_class() + 1 for _ in range(6)] == oracle

    def test_three_classes_first_ten(self):
        oracle, counts = greedy_oracle([0.5, 0.3, 0.2], 10)
        assert oracle == [1, 2, 3, 1, 1, 2, 1, 3, 2, 1]
        assert counts == [5, 3, 2]
        scheme = PartitionScheme([0.5, 0.3, 0.2])
        assert [scheme.assign_class() + 1 for _ in range(10)] == oracle
        assert scheme.counts == [5, 3, 2]

    @pytest.mark.parametrize("p", [[0.5, 0.3, 0.2], [1 / 8] * 8, [0.7, 0.2, 0.1], [1 / 3] * 3])
    def test_bulk_matches_sequential_and_exact(self, p):
        n = 3000
        scheme = PartitionScheme(p)
        seq = [scheme.assign_class() for _ in range(n)]
        assert list(class_labels(p, n)) == seq
        oracle, _ = greedy_oracle(p, n)
        assert [k + 1 for k in seq] == oracle

    @pytest.mark.parametrize("p", [[0.5, 0.3, 0.2], [1 / 8] * 8, [0.6, 0.25, 0.1, 0.05]])
    def test_discrepancy_at_most_one(self, p):
        labels = class_labels(p, 200_000)
        assert max_discrepancy_trace(labels, p).max() <= 1.0

    def test_count_discrepancy_at_checkpoints(self):
        p = [0.5, 0.3, 0.2]
        labels = class_labels(p, 1000)
        trace = max_discrepancy_trace(labels, p)
        assert count_discrepancy(labels, p, [10, 100, 1000]) == pytest.approx(trace[[9, 99, 999]])

    @pytest.mark.parametrize("p", [[0.5, 0.49], [0.5, 0.6, -0.1], [], [0.0, 1.0]])
    def test_invalid_densities(self, p):
        with pytest.raises(ValueError):
            PartitionScheme(p)


class TestDirections:
    def test_two_uniform(self):
        assert np.allclose(direction_sequence(2, 2), [[1, 0], [0, 1]])

    def test_four_uniform(self):
        s = direction_sequence(2, 4)
        assert np.allclose(np.degrees(np.arctan2(s[:, 1], s[:, 0])), [0, 45, 90, 135])

    def test_full_circle(self):
        s = direction_sequence(2, 8, "full-angles-2d")
        assert np.allclose(np.degrees(np.arctan2(s[:, 1], s[:, 0])) % 360, np.arange(0, 360, 45))

    @pytest.mark.parametrize("mode,d", [("uniform-angles-2d", 2), ("full-angles-2d", 2),
                                        ("seeded-quasi-uniform", 3), ("seeded-quasi-uniform", 5)])
    def test_unit_norm(self, mode, d):
        s = direction_sequence(d, 37, mode, seed=4)
        assert np.all(np.abs(np.linalg.norm(s, axis=1) - 1) <= 1e-12)

    def test_seeded_is_deterministic(self):
        assert np.array_equal(direction_sequence(3, 5, "seeded-quasi-uniform", seed=9),
                              direction_sequence(3, 5, "seeded-quasi-uniform", seed=9))

    def test_explicit_rejects_non_unit(self):
        with pytest.raises(ValueError):
            direction_sequence(2, 1, "explicit", explicit=[[1.0, 1.0]])


class TestSpec:
    def test_ball_radii(self):
        spec = build_spec(Ball(1.0), direction_sequence(2, 6), seed=1)
        assert np.allclose(spec.radii, 1.0)
        assert spec.max_second_moment == pytest.approx(1.0)

    def test_square_radii(self):
        s = np.array([[1.0, 0.0], [1 / math.sqrt(2), 1 / math.sqrt(2)]])
        spec = build_spec(Polytope([[1, 1], [1, -1]]), s)
        assert spec.radii == pytest.approx([1.0, math.sqrt(2)], abs=1e-9)
        assert np.allclose(spec.variances, spec.radii**2)

    def test_radii_within_circumradius(self):
        body = regular_polygon(5, 2.0)
        spec = build_spec(body, direction_sequence(2, 17))
        assert spec.radii.max() <= body.circumradius
        assert spec.radii.min() >= 0

    def test_truncated_target_inside_v(self):
        body = Ball(1.0)
        spec = build_spec(body, direction_sequence(2, 5))
        probes = ProbeSet.uniform(2, 256)
        assert np.all(support_values(truncated_target(spec), probes) <= support_values(body, probes) + 1e-9)

    def test_truncated_target_exact_for_square_vertices(self):
        body = Polytope([[1, 1], [1, -1]])
        spec = build_spec(body, direction_sequence(2, 8, "full-angles-2d"))
        probes = ProbeSet.uniform(2, 256)
        gap = np.abs(support_values(truncated_target(spec), probes) - support_values(body, probes))
        assert gap.max() <= 1e-9

    def test_density_length_mismatch(self):
        with pytest.raises(ValueError):
            build_spec(Ball(1.0), direction_sequence(2, 3), densities=[0.5, 0.5])


class TestSamples:
    def test_zero_radius_gives_origin(self):
        spec = build_spec(Polytope([[1.0, 0.0]]), [[0.0, 1.0], [1.0, 0.0]])
        assert spec.radii[0] == 0.0
        scheme = PartitionScheme(spec.densities)
        x1 = draw_sample(spec, 1, scheme)
        assert np.array_equal(x1, [0.0, 0.0])

    def test_sequential_matches_block(self):
        spec = build_spec(regular_polygon(3), direction_sequence(2, 5), seed=12)
        scheme = PartitionScheme(spec.densities)
        seq = np.array([draw_sample(spec, n, scheme) for n in range(1, 201)])
        block, _, _ = sample_block(spec, 1, 200)
        assert np.array_equal(seq, block)

    def test_counter_determinism(self):
        spec = build_spec(Ball(1.0), direction_sequence(2, 4), seed=5)
        late, _, _ = sample_block(spec, 500, 10)
        full, _, _ = sample_block(spec, 1, 509)
        assert np.array_equal(late, full[499:])

    def test_index_mismatch(self):
        spec = build_spec(Ball(1.0), direction_sequence(2, 2))
        with pytest.raises(ValueError):
            draw_sample(spec, 3, PartitionScheme(spec.densities))

    def test_points_on_class_lines(self):
        spec = build_spec(regular_polygon(4), direction_sequence(2, 7), seed=3)
        x, k, xi = sample_block(spec, 1, 10_000)
        s = spec.directions[k]
        # 2D cross product with s_k vanishes on the line through +-s_k
        resid = np.abs(x[:, 0] * s[:, 1] - x[:, 1] * s[:, 0])
        assert np.all(resid <= 1e-12 * np.abs(xi) * spec.radii[k] + 1e-300)

    def test_moments_of_projection(self):
        spec = build_spec(Polytope([[1, 1], [1, -1]]), direction_sequence(2, 4), seed=21)
        x, k, _ = sample_block(spec, 1, 100_000)
        u = np.array([0.6, 0.8])
        proj = x @ u
        for cls in range(spec.m):
            vals = proj[k == cls]
            var = spec.radii[cls] ** 2 * float(spec.directions[cls] @ u) ** 2
            se_mean = math.sqrt(var / vals.size)
            se_var = var * math.sqrt(2 / vals.size)
            assert abs(vals.mean()) <= 3 * se_mean + 1e-15
            assert abs(vals.var() - var) <= 3 * se_var + 1e-15

    def test_per_class_normal_sanity(self):
        spec = build_spec(Ball(1.0), direction_sequence(2, 8), seed=77)
        _, k, xi = sample_block(spec, 1, 80_000)
        for cls in range(spec.m):
            z = xi[k == cls]
            assert abs(z.mean()) <= 4 / math.sqrt(z.size)
            assert abs(z.var() - 1) <= 6 / math.sqrt(z.size)

    def test_blocks_respect_stops(self):
        spec = build_spec(Ball(1.0), direction_sequence(2, 3), seed=2)
        ends = [start + xi.size - 1 for start, _, _, xi in iter_blocks(spec, 1000, 128, stops=[100, 500])]
        assert 100 in ends and 500 in ends and ends[-1] == 1000
        chunks = np.concatenate([x for _, x, _, _ in iter_blocks(spec, 1000, 128, stops=[100, 500])])
        assert np.array_equal(chunks, sample_block(spec, 1, 1000)[0])
