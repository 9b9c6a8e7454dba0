"""Monte Carlo evaluation of boundary-value expectations with uncertainty.

The estimated quantity is the mean of the boundary data over walk exit
points; by the martingale argument this equals the harmonic extension of the
data at the walk origin.  Estimates carry a standard error, truncation
fraction, and step statistics.

Reproducibility model: sample i of a run always uses the random stream
derived from ``(seed, index_offset + i)``, samples are processed in fixed
blocks of ``BLOCK_SIZE``, and block partials are merged in block order.  The
partition into blocks never depends on the worker count, so a run's output is
bit-identical whether it executes on one process or many.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import sqrt

import numpy as np

from .geometry import Domain, OutsideDomainError, as_point
from .oracle import (
    BoundaryFunction,
    eval_boundary,
    eval_boundary_many,
    equidistributed_sphere_points,
    validate_pairing,
)
from .walk import WalkParams, positions_after, run_walk_block

BLOCK_SIZE = 4096
TRUNCATION_WARN_FRACTION = 0.01


class HighTruncationWarning(UserWarning):
    """More than 1% of walks hit the step cap; results may carry extra bias."""


@dataclass
class RunningMoments:
    """One-pass mean/variance accumulator (Welford update, pairwise merge).

    The update rule keeps the mean exact on constant data for any sample
    count, and the merge is associative up to rounding, so partials can be
    combined across blocks without a second pass over the samples.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def update(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "RunningMoments") -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / total
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.count = total

    @classmethod
    def from_values(cls, values) -> "RunningMoments":
        acc = cls()
        for x in values:
            acc.update(float(x))
        return acc

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        return sqrt(self.variance / self.count) if self.count > 0 else 0.0


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo mean of the boundary data over walk exits, with diagnostics."""

    mean: float
    stderr: float
    n_samples: int
    truncation_fraction: float
    mean_steps: float
    point: np.ndarray


@dataclass(frozen=True)
class ConsistencyReport:
    """Outcome of one internal consistency check.

    ``max_discrepancy`` and ``threshold`` belong to the worst comparison (the
    one with the smallest margin), so ``passed == (max_discrepancy <=
    threshold)`` always holds.
    """

    quantity: str
    values: tuple
    max_discrepancy: float
    threshold: float
    passed: bool


def iter_blocks(n: int, size: int = BLOCK_SIZE):
    """Fixed partition of range(n) into (start, count) blocks."""
    for start in range(0, n, size):
        yield start, min(size, n - start)


def _block_partial(domain, f, v, params, seed, start, count):
    exits, steps, truncated, _ = run_walk_block(v, domain, params, seed, start, count)
    values = eval_boundary_many(f, exits, domain)
    acc = RunningMoments.from_values(values)
    return acc.count, acc.mean, acc.m2, int(steps.sum()), int(truncated.sum())


def _block_partial_star(args):
    return _block_partial(*args)


def estimate_point(
    domain: Domain,
    f: BoundaryFunction,
    v,
    params: WalkParams,
    n: int,
    seed: int,
    workers: int = 1,
    index_offset: int = 0,
) -> Estimate:
    """Estimate the boundary-value expectation at interior point v from n walks.

    Sample i uses the stream (seed, index_offset + i); output is independent
    of ``workers``.  Raises for points not strictly inside the domain (the
    boundary case is exact data, not an expectation, and is handled by the
    callers that deal in grids).
    """
    p = as_point(v, domain.dim)
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    if not domain.contains(p):
        raise OutsideDomainError(f"evaluation point {p.tolist()} is not inside the domain")
    validate_pairing(f, domain)

    tasks = [(domain, f, p, params, seed, index_offset + start, count) for start, count in iter_blocks(n)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_block_partial_star, tasks, chunksize=1))
    else:
        partials = [_block_partial_star(t) for t in tasks]

    acc = RunningMoments()
    steps_total = 0
    trunc_total = 0
    for count, mean, m2, steps_sum, trunc in partials:  # merge in block order
        acc.merge(RunningMoments(count, mean, m2))
        steps_total += steps_sum
        trunc_total += trunc

    trunc_frac = trunc_total / n
    if trunc_frac > TRUNCATION_WARN_FRACTION:
        warnings.warn(
            f"{trunc_frac:.2%} of walks hit the step cap at {p.tolist()}", HighTruncationWarning, stacklevel=2
        )
    return Estimate(acc.mean, acc.stderr, n, trunc_frac, steps_total / n, p)


@dataclass(frozen=True)
class GridEntry:
    """Per-point result of a field evaluation: an estimate, exact boundary data, or a skip."""

    point: np.ndarray
    status: str  # "ok" | "boundary" | "outside"
    value: float | None
    estimate: Estimate | None


def estimate_grid(
    domain: Domain,
    f: BoundaryFunction,
    points,
    params: WalkParams,
    n_per_point: int,
    seed: int,
    workers: int = 1,
    boundary_tol: float = 1e-9,
) -> list[GridEntry]:
    """Independent estimates at many points with disjoint stream ranges.

    Points within ``boundary_tol`` of the boundary get the exact boundary
    value (zero stderr); points outside are flagged and skipped.  Point k
    always owns stream indices [k*n_per_point, (k+1)*n_per_point), so results
    for each point do not depend on which other points are requested.
    """
    pts = [as_point(q, domain.dim) for q in points]
    if not pts:
        raise ValueError("empty point list")
    entries = []
    for k, q in enumerate(pts):
        if domain.boundary_distance(q) <= boundary_tol:
            value = eval_boundary(f, domain.boundary_projection(q), domain)
            entries.append(GridEntry(q, "boundary", value, None))
        elif not domain.contains(q):
            entries.append(GridEntry(q, "outside", None, None))
        else:
            est = estimate_point(
                domain, f, q, params, n_per_point, seed, workers=workers, index_offset=k * n_per_point
            )
            entries.append(GridEntry(q, "ok", est.mean, est))
    return entries


def _worst_pair(values, thresholds):
    """Index of the comparison with the least margin under its threshold."""
    margins = [v - t for v, t in zip(values, thresholds)]
    worst = int(np.argmax(margins))
    return values[worst], thresholds[worst], margins[worst] <= 0.0


def check_r_independence(
    domain: Domain,
    f: BoundaryFunction,
    v,
    r_values,
    params: WalkParams,
    n: int,
    seed: int,
    bias_allowance: float = 0.005,
    workers: int = 1,
) -> ConsistencyReport:
    """The estimated value must not depend on the contraction factor.

    Each r is estimated with the same seed and compared pairwise within
    3 combined standard errors plus twice the shell-bias allowance.
    """
    rs = [float(r) for r in r_values]
    if len(rs) < 2:
        raise ValueError("need at least two contraction factors to compare")
    for r in rs:
        if not (0.0 < r < 1.0):
            raise ValueError(f"contraction factor r must lie in (0, 1), got {r}")
    estimates = [estimate_point(domain, f, v, params.with_r(r), n, seed, workers=workers) for r in rs]
    gaps, thresholds = [], []
    for i in range(len(rs)):
        for j in range(i + 1, len(rs)):
            ei, ej = estimates[i], estimates[j]
            gaps.append(abs(ei.mean - ej.mean))
            thresholds.append(3.0 * sqrt(ei.stderr**2 + ej.stderr**2) + 2.0 * bias_allowance)
    gap, thr, ok = _worst_pair(gaps, thresholds)
    values = tuple((f"r={r:g}", e.mean, e.stderr) for r, e in zip(rs, estimates))
    return ConsistencyReport("r-independence", values, gap, thr, ok)


def check_mean_value(
    domain: Domain,
    f: BoundaryFunction,
    x,
    rho: float,
    k_sphere_points: int,
    params: WalkParams,
    n: int,
    seed: int,
    bias_allowance: float = 0.005,
    workers: int = 1,
) -> ConsistencyReport:
    """The estimated field must equal its average over a contained sphere."""
    p = as_point(x, domain.dim)
    if not domain.contains(p) or not domain.distance_to_boundary(p) > rho:
        raise ValueError(f"closed ball of radius {rho} around {p.tolist()} is not contained in the domain")
    center = estimate_point(domain, f, p, params, n, seed, workers=workers)
    nodes = equidistributed_sphere_points(p, rho, k_sphere_points, domain.dim)
    sphere_estimates = [
        estimate_point(domain, f, node, params, n, seed, workers=workers, index_offset=(1 + j) * n)
        for j, node in enumerate(nodes)
    ]
    k = len(sphere_estimates)
    sphere_mean = sum(e.mean for e in sphere_estimates) / k
    sphere_se = sqrt(sum(e.stderr**2 for e in sphere_estimates)) / k
    gap = abs(center.mean - sphere_mean)
    thr = 3.0 * sqrt(center.stderr**2 + sphere_se**2) + 2.0 * bias_allowance
    values = (
        ("center", center.mean, center.stderr),
        (f"sphere-average(k={k}, rho={rho:g})", sphere_mean, sphere_se),
    )
    return ConsistencyReport("mean-value property", values, gap, thr, gap <= thr)


def check_coordinate_martingale(
    domain: Domain,
    v,
    params: WalkParams,
    n: int,
    step_index: int,
    seed: int = 0,
) -> ConsistencyReport:
    """After any fixed number of steps the walk's mean position is its origin.

    ``step_index`` is 1-based with X(1) = v, so step_index=1 compares v to
    itself and the discrepancy is exactly zero.
    """
    p = as_point(v, domain.dim)
    if step_index < 1:
        raise ValueError(f"step index must be >= 1, got {step_index}")
    pos = np.empty((n, domain.dim))
    for start, count in iter_blocks(n):
        pos[start : start + count] = positions_after(p, domain, params.r, step_index - 1, seed, start, count)
    # Welford per component: exact when the positions are all identical (step 1)
    accs = [RunningMoments.from_values(pos[:, j]) for j in range(domain.dim)]
    means = np.array([a.mean for a in accs])
    stderrs = np.array([a.stderr for a in accs])
    gaps = np.abs(means - p)
    thresholds = 3.0 * stderrs
    gap, thr, ok = _worst_pair(list(gaps), list(thresholds))
    values = tuple((f"x{j}", float(means[j]), float(stderrs[j])) for j in range(domain.dim))
    return ConsistencyReport(f"coordinate martingale at step {step_index}", values, gap, thr, ok)
