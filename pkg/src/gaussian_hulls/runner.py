"""Checkpointed experiments and their CSV reports.

Each ``run_*`` function takes an :class:`ExperimentConfig` and returns a
:class:`Report`: raw rows plus per-checkpoint aggregates (median and
quartiles across seeds). Seeds are independent and may run on a thread
pool; rows are always assembled in config order, so the output does not
depend on the thread count.
"""

import csv
import io
import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .construction import (
    build_spec,
    class_labels,
    direction_sequence,
    iter_blocks,
    max_discrepancy_trace,
    normalizer_b,
    truncated_target,
)
from .geometry import Ellipsoid, ProbeSet, check_psd, support_values
from .hull_engine import (
    SupportAccumulator,
    exact_hausdorff_2d,
    normalized_support,
    write_hull_csv,
)
from .streams import normal_block

log = logging.getLogger(__name__)

CHUNK = 1 << 16
LOWER_BOUND_TOL = 1e-9


class InvariantViolation(RuntimeError):
    """A property that must hold in every run was observed to fail."""


@dataclass
class Report:
    columns: list
    rows: list = field(default_factory=list)
    metrics: list = field(default_factory=list)
    group_by: str = "n"
    # not serialized: final accumulator per seed, for inspection
    accumulators: dict = field(default_factory=dict, repr=False)
    interrupted: bool = False

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def summary(self):
        """Rows of ``(group, metric, median, q25, q75, count)``."""
        if not self.rows:
            return []
        gi = self.columns.index(self.group_by)
        groups = sorted({row[gi] for row in self.rows})
        out = []
        for g in groups:
            sub = [row for row in self.rows if row[gi] == g]
            for metric in self.metrics:
                mi = self.columns.index(metric)
                vals = np.array([r[mi] for r in sub if r[mi] is not None], dtype=float)
                vals = vals[~np.isnan(vals)]
                if vals.size == 0:
                    continue
                q25, med, q75 = np.percentile(vals, [25, 50, 75])
                out.append((g, metric, float(med), float(q25), float(q75), int(vals.size)))
        return out

    def median(self, metric, group):
        for g, m, med, *_ in self.summary():
            if g == group and m == metric:
                return med
        raise KeyError((metric, group))

    def medians(self, metric):
        return {g: med for g, m, med, *_ in self.summary() if m == metric}

    def to_csv(self):
        return _csv_text(self.columns, self.rows)

    def summary_csv(self):
        header = [self.group_by, "metric", "median", "q25", "q75", "count"]
        return _csv_text(header, self.summary())

    def write(self, out_dir, name="report"):
        os.makedirs(out_dir, exist_ok=True)
        atomic_write(os.path.join(out_dir, f"{name}.csv"), self.to_csv())
        atomic_write(os.path.join(out_dir, "summary.csv"), self.summary_csv())


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def atomic_write(path, text):
    """Write via a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _collect(report, seeds, fn, threads):
    """Run ``fn`` per seed and append rows in seed order; stops cleanly on Ctrl-C."""
    try:
        if threads <= 1 or len(seeds) <= 1:
            results = (fn(s) for s in seeds)
            for seed, (rows, acc) in zip(seeds, results):
                report.rows.extend(rows)
                report.accumulators[seed] = acc
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for seed, (rows, acc) in zip(seeds, pool.map(fn, seeds)):
                    report.rows.extend(rows)
                    report.accumulators[seed] = acc
    except KeyboardInterrupt:
        report.interrupted = True
    return report


def construction_directions(cfg):
    c = cfg.construction
    if isinstance(c.directions, str):
        return direction_sequence(cfg.dimension, c.m, c.directions, seed=cfg.seeds[0])
    return direction_sequence(cfg.dimension, c.m, "explicit", explicit=c.directions)


def make_spec(cfg):
    return build_spec(cfg.body(), construction_directions(cfg), cfg.construction.densities, cfg.seeds[0])


def make_probes(cfg):
    return ProbeSet.uniform(cfg.dimension, cfg.probes)


def _checkpoints(cfg):
    return [n for n in cfg.checkpoints if n >= 2]


def counterexample_columns(m, planar):
    cols = ["seed", "n", "sup_error_vs_v", "sup_error_vs_vm"]
    if planar:
        cols.append("hausdorff_2d_vs_vm")
    cols += ["max_density_discrepancy", "violations"]
    cols += [f"class_max_{k + 1}" for k in range(m)]
    return cols


def _counterexample_seed(seed, spec, target, vm, probes, checkpoints, eps, planar, hull_dir=None):
    spec = spec.with_seed(seed)
    n_max = checkpoints[-1]
    acc = SupportAccumulator(probes, retain_hull=planar)
    h_v = support_values(target, probes)
    h_vm = support_values(vm, probes)
    vm_poly = vm.vertices_2d() if planar else None
    class_max = np.full(spec.m, -np.inf)
    violations = 0
    rows = []
    stops = set(checkpoints)
    for start, x, labels, xi in iter_blocks(spec, n_max, CHUNK, checkpoints):
        acc.ingest_many(x)
        np.maximum.at(class_max, labels, xi)
        idx = np.arange(start, start + xi.size)
        keep = idx >= 2
        if keep.any():
            violations += int(analysis.violation_mask(
                xi[keep], labels[keep], spec.radii, idx[keep].astype(float), eps).sum())
        end = idx[-1]
        if end not in stops:
            continue
        b = normalizer_b(end)
        m_n = normalized_support(acc)
        err_vm = float(np.abs(m_n - h_vm).max())
        row = [seed, int(end), float(np.abs(m_n - h_v).max()), err_vm]
        if planar:
            d_exact = exact_hausdorff_2d(acc.hull().scaled(1.0 / b), vm_poly)
            if d_exact < err_vm - LOWER_BOUND_TOL:
                raise InvariantViolation(
                    f"seed {seed}, n {end}: exact Hausdorff {d_exact} below probe estimate {err_vm}")
            row.append(d_exact)
            if hull_dir is not None:
                write_hull_csv(os.path.join(hull_dir, f"hull_{end}.csv"), acc.hull().scaled(1.0 / b))
        counts = np.bincount(class_labels(spec.densities, n_max)[:end], minlength=spec.m)
        row.append(float(np.abs(counts - end * spec.densities).max()))
        row.append(violations)
        row += [float(v / b) if np.isfinite(v) else None for v in class_max]
        rows.append(row)
    return rows, acc


def run_counterexample(cfg, threads=None, hull_dir=None):
    """Normalized hulls of the line-supported construction against ``V`` and ``V_m``."""
    threads = cfg.threads if threads is None else threads
    target = cfg.body()
    spec = make_spec(cfg)
    vm = truncated_target(spec)
    probes = make_probes(cfg)
    checkpoints = _checkpoints(cfg)
    planar = cfg.dimension == 2
    report = Report(counterexample_columns(spec.m, planar))
    report.metrics = [c for c in report.columns if c not in ("seed", "n")]
    if not checkpoints:
        return report
    if hull_dir is not None:
        os.makedirs(hull_dir, exist_ok=True)

    def one(seed):
        dump = hull_dir if (hull_dir is not None and seed == cfg.seeds[0]) else None
        return _counterexample_seed(seed, spec, target, vm, probes, checkpoints,
                                    cfg.epsilon, planar, dump)

    return _collect(report, cfg.seeds, one, threads)


def covariance_factor(sigma):
    """``L`` with ``L L' = sigma``; Cholesky when possible, eigen-factor otherwise."""
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    check_psd(sigma)
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        evals, evecs = np.linalg.eigh(sigma)
        return evecs * np.sqrt(np.clip(evals, 0.0, None))


def gaussian_block(seed, start, count, factor):
    """i.i.d. ``N(0, L L')`` samples; coordinate ``i`` of ``z`` uses stream ``i``."""
    d = factor.shape[1]
    z = np.column_stack([normal_block(seed, start, count, stream=i) for i in range(d)])
    if np.array_equal(factor, np.eye(d)):
        return z
    return z @ factor.T


GOODMAN_COLUMNS = ["seed", "n", "sup_error", "mean_abs_error", "max_deficit", "max_excess"]


def _goodman_seed(seed, factor, target, probes, checkpoints):
    acc = SupportAccumulator(probes)
    h = support_values(target, probes)
    rows = []
    stops = sorted(set(checkpoints))
    start = 1
    for stop in stops:
        while start <= stop:
            count = min(CHUNK, stop - start + 1)
            acc.ingest_many(gaussian_block(seed, start, count, factor))
            start += count
        err = normalized_support(acc) - h
        rows.append([seed, stop, float(np.abs(err).max()), float(np.abs(err).mean()),
                     float(max(-err.min(), 0.0)), float(max(err.max(), 0.0))])
    return rows, acc


def run_goodman(cfg, threads=None):
    """i.i.d. ``N(0, sigma)`` samples against the concentration ellipsoid of ``sigma``."""
    threads = cfg.threads if threads is None else threads
    sigma = cfg.goodman_covariance()
    factor = covariance_factor(sigma)
    target = Ellipsoid(sigma)
    probes = make_probes(cfg)
    checkpoints = _checkpoints(cfg)
    report = Report(list(GOODMAN_COLUMNS), metrics=GOODMAN_COLUMNS[2:])
    if not checkpoints:
        return report

    def one(seed):
        return _goodman_seed(seed, factor, target, probes, checkpoints)

    return _collect(report, cfg.seeds, one, threads)


TAILBOUND_COLUMNS = ["n", "epsilon", "gamma", "bound", "exact_tail", "ratio",
                     "bound_partial_sum", "exact_partial_sum", "summable"]


def run_tailbound(cfg):
    """The bound ``C(gamma) n^(-2 gamma (1+eps)^2)`` against the exact tail on a grid."""
    t = cfg.tailbound
    ns = sorted(t.n)
    report = Report(list(TAILBOUND_COLUMNS), metrics=["ratio"], group_by="n")
    for eps in t.epsilon:
        for gamma in t.gamma:
            exact_ps, bound_ps = analysis.tail_partial_sums(ns[-1], eps, gamma)
            for n in ns:
                bound = analysis.tail_bound(n, eps, gamma)
                exact = analysis.gaussian_tail_exact((1 + eps) * normalizer_b(n))
                report.rows.append([
                    n, eps, gamma, bound, exact, bound / exact,
                    float(bound_ps[n - 2]), float(exact_ps[n - 2]),
                    int(gamma * (1 + eps) ** 2 > 0.5),
                ])
    report.rows.sort(key=lambda r: (r[1], r[2], r[0]))
    return report


PARTITION_COLUMNS = ["n", "class", "count", "expected", "discrepancy"]


def run_partition_check(cfg):
    """Per-class counts against ``n p_k`` at each checkpoint.

    Raises :class:`InvariantViolation` if ``max_k |c_k(n) - n p_k|`` exceeds 1
    for any ``n`` up to the last checkpoint.
    """
    m = cfg.construction.m
    p = np.full(m, 1.0 / m) if cfg.construction.densities == "uniform" else np.asarray(
        cfg.construction.densities, dtype=float)
    checkpoints = _checkpoints(cfg)
    report = Report(list(PARTITION_COLUMNS), metrics=["discrepancy"], group_by="n")
    if not checkpoints:
        return report
    labels = class_labels(p, checkpoints[-1])
    worst = max_discrepancy_trace(labels, p)
    for n in checkpoints:
        counts = np.bincount(labels[:n], minlength=m)
        for k in range(m):
            report.rows.append([n, k + 1, int(counts[k]), float(n * p[k]),
                                float(counts[k] - n * p[k])])
    report.max_discrepancy = float(worst.max())
    if report.max_discrepancy > 1.0 + 1e-9:
        bad = int(np.argmax(worst > 1.0 + 1e-9)) + 1
        raise InvariantViolation(f"partition discrepancy {worst[bad - 1]} > 1 at n = {bad}")
    return report


def gumbel_reference(n):
    """Predicted ``max / b(n)`` from the second-order Gumbel location."""
    return analysis.gumbel_center(n) / normalizer_b(n)


def run(cfg, out_dir=None, threads=None):
    """Dispatch on ``cfg.mode``, write the CSVs and return the report."""
    out_dir = out_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    mode = cfg.mode
    if mode == "counterexample":
        hull_dir = out_dir if cfg.hull_dump and cfg.dimension == 2 else None
        report = run_counterexample(cfg, threads, hull_dir)
    elif mode == "hull2d-demo":
        if cfg.dimension != 2:
            raise ValueError("hull2d-demo needs dimension 2")
        report = run_counterexample(cfg, threads, hull_dir=out_dir)
    elif mode == "goodman":
        report = run_goodman(cfg, threads)
    elif mode == "tailbound":
        report = run_tailbound(cfg)
    elif mode == "partition-check":
        report = run_partition_check(cfg)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    report.write(out_dir)
    log.info("wrote %d rows to %s", len(report.rows), out_dir)
    if report.interrupted:
        raise KeyboardInterrupt
    return report
