"""Acceptance battery: one test per criterion, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Tolerances are fixed here, not tuned: statistical checks use three
standard errors plus a shell-bias allowance of 0.005 (doubled where two
estimates are compared).
"""

import math

import numpy as np
import pytest

from dirichlet_mc import (
    AxisBox,
    Ball,
    BarrierSpec,
    Constant,
    Coordinate,
    FourierCircle,
    HarmonicPoly2D,
    PiecewiseLabel,
    PuncturedBall,
    WalkParams,
    analytic_solution,
    check_mean_value,
    check_r_independence,
    estimate_point,
    fd_solve,
    regularity_report,
    verify_barrier,
)
from dirichlet_mc import cli
from dirichlet_mc.estimator import iter_blocks
from dirichlet_mc.geometry import interior_anchor
from dirichlet_mc.oracle import UNKNOWN_STATUS
from dirichlet_mc.sampling import sample_unit_sphere_many, derive_stream
from dirichlet_mc.walk import run_walk_block

from conftest import catalog

PARAMS = WalkParams(r=0.5)
SEED = 20240901


def report(criterion: str, ok: bool, detail: str) -> bool:
    print(f"[acceptance] {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def test_criterion_01_constant_exactness():
    worst = 0.0
    ok = True
    for name, dom in catalog().items():
        est = estimate_point(dom, Constant(7.0), interior_anchor(dom), PARAMS, 100, SEED)
        ok = ok and est.mean == 7.0 and est.stderr == 0.0
        worst = max(worst, abs(est.mean - 7.0), est.stderr)
    assert report("1 constant exactness", ok, f"worst deviation {worst:g}, n=100 per domain")


@pytest.mark.parametrize("dim", [2, 3])
def test_criterion_02_coordinate_martingale_identity(dim):
    dom = Ball([0.0] * dim, 1.0)
    v = np.zeros(dim)
    v[0] = 0.3
    est = estimate_point(dom, Coordinate(0), v, PARAMS, 100_000, SEED)
    gap = abs(est.mean - 0.3)
    tol = 3.0 * est.stderr + 0.005
    assert report(
        f"2 coordinate martingale identity (d={dim})", gap <= tol, f"|{est.mean:.5f} - 0.3| = {gap:.2e} <= {tol:.2e}"
    )


PROBES = [(0.25, 0.25), (0.5, 0.25), (0.5, 0.5), (0.25, 0.75), (0.75, 0.75)]


def test_criterion_03_harmonic_polynomial_oracle():
    box = AxisBox([0.0, 0.0], [1.0, 1.0])
    data = HarmonicPoly2D("x2-y2")
    fd = fd_solve(box, data, 1.0 / 64)
    ok = True
    worst_analytic = worst_fd = 0.0
    for k, probe in enumerate(PROBES):
        est = estimate_point(box, data, probe, PARAMS, 100_000, SEED, index_offset=k * 100_000)
        exact = analytic_solution(box, data, probe)
        gap_a = abs(est.mean - exact)
        gap_f = abs(est.mean - fd.value_at(probe))
        tol_a = 3.0 * est.stderr + 0.005
        tol_f = tol_a + 5e-4
        ok = ok and gap_a <= tol_a and gap_f <= tol_f
        worst_analytic = max(worst_analytic, gap_a)
        worst_fd = max(worst_fd, gap_f)
    assert report(
        "3 harmonic polynomial oracle",
        ok,
        f"worst |mc-analytic| {worst_analytic:.2e}, worst |mc-fd| {worst_fd:.2e}, 5 probes, n=1e5",
    )


def test_criterion_04_r_independence():
    box = AxisBox([0.0, 0.0], [1.0, 1.0])
    rep = check_r_independence(
        box, HarmonicPoly2D("x2-y2"), PROBES[0], (0.3, 0.5, 0.9), PARAMS, 100_000, SEED, bias_allowance=0.005
    )
    assert report(
        "4 r-independence",
        rep.passed,
        f"max pairwise gap {rep.max_discrepancy:.2e} <= {rep.threshold:.2e} for r in (0.3, 0.5, 0.9)",
    )


def test_criterion_05_mean_value_property():
    ball = Ball([0.0, 0.0], 1.0)
    rep = check_mean_value(ball, FourierCircle(a=(0.0, 0.0, 1.0)), [0.2, 0.1], 0.3, 64, PARAMS, 10_000, SEED)
    assert report(
        "5 mean value property",
        rep.passed,
        f"|center - sphere average| = {rep.max_discrepancy:.2e} <= {rep.threshold:.2e}, 64 sphere points",
    )


def test_criterion_06_boundary_convergence():
    total_truncated = 0
    for name, dom in catalog().items():
        params = WalkParams(r=0.5, epsilon=1e-4 * dom.diameter(), max_steps=100_000)
        v = interior_anchor(dom)
        for start, count in iter_blocks(10_000):
            _, _, truncated, _ = run_walk_block(v, dom, params, SEED, start, count)
            total_truncated += int(truncated.sum())
    assert report(
        "6 boundary convergence", total_truncated == 0, f"{total_truncated} truncations in 1e4 walks per domain"
    )


@pytest.mark.parametrize("dim", [2, 3, 8])
def test_criterion_07_sphere_sampler_statistics(dim):
    n = 1_000_000
    pts = sample_unit_sphere_many(derive_stream(SEED, dim), dim, n)
    norm_err = np.abs(np.linalg.norm(pts, axis=1) - 1.0).max()
    mean_norm = np.linalg.norm(pts.mean(axis=0))
    cov_gap = np.abs(np.diag(pts.T @ pts / n) - 1.0 / dim).max()
    ok = norm_err <= 1e-12 and mean_norm <= 5.0 / math.sqrt(n) and cov_gap <= 5.0 * math.sqrt(2.0 / n)
    assert report(
        f"7 sphere sampler statistics (d={dim})",
        ok,
        f"norm err {norm_err:.1e}, mean norm {mean_norm:.1e}, cov diag gap {cov_gap:.1e}, N=1e6",
    )


@pytest.mark.parametrize("dim", [2, 3])
def test_criterion_08_barrier_certificates(dim):
    dom = Ball([0.0] * dim, 1.0)
    v = np.zeros(dim)
    v[0] = 1.0
    rep = verify_barrier(dom, BarrierSpec.from_boundary_point(dom, v), n_samples=10_000, seed=SEED)
    assert report(
        f"8 barrier certificate (d={dim})",
        rep.passed,
        f"|q(v)| = {abs(rep.value_at_v):.1e}, min away {rep.min_value_away:.2e}, "
        f"mvp residual {rep.max_mean_value_residual:.1e}",
    )


ZAREMBA_REASON = (
    "stop-at-puncture mass obeys the optional-stopping value of log|x|: about "
    "log(1/0.3)/log(1/eps) = 0.14 at eps = 2e-4, so the estimate settles near 0.86. "
    "Reaching 0.99 needs eps < 1e-105 and the 1e-3 exit fraction eps < 1e-523, "
    "below the smallest positive float64."
)


@pytest.mark.xfail(strict=True, reason=ZAREMBA_REASON)
def test_criterion_09_irregular_point_demo():
    dom = PuncturedBall([0.0, 0.0], 1.0, [0.0, 0.0])
    f = PiecewiseLabel({"sphere": 1.0, "puncture": 0.0})
    n = 100_000
    est = estimate_point(dom, f, [0.3, 0.0], PARAMS, n, SEED)
    captured = 0
    for start, count in iter_blocks(n):
        exits, _, _, _ = run_walk_block([0.3, 0.0], dom, PARAMS, SEED, start, count)
        captured += int((np.linalg.norm(exits, axis=1) < 0.5).sum())
    frac = captured / n
    ok = 0.99 <= est.mean <= 1.0 and frac <= 1e-3
    report("9 irregular point demo", ok, f"estimate {est.mean:.4f} (target [0.99, 1.0]), puncture fraction {frac:.4f}")
    assert ok


def test_criterion_09_irregular_point_diagnosis_and_measured_mass():
    """The attainable parts of the irregular-point demo.

    The diagnosis must refuse to certify the puncture, and the measured
    puncture-exit mass must match its independent martingale prediction
    (which is what rules the [0.99, 1.0] window out; see the xfail above).
    """
    dom = PuncturedBall([0.0, 0.0], 1.0, [0.0, 0.0])
    entries = regularity_report(dom, [[0.0, 0.0]])
    ok = entries[0].status == UNKNOWN_STATUS

    n = 100_000
    captured = 0
    for start, count in iter_blocks(n):
        exits, _, _, _ = run_walk_block([0.3, 0.0], dom, PARAMS, SEED, start, count)
        captured += int((np.linalg.norm(exits, axis=1) < 0.5).sum())
    frac = captured / n
    eps = PARAMS.resolve_epsilon(dom)
    p_hi = math.log(1 / 0.3) / math.log(1 / eps)
    p_lo = math.log(1 / 0.3) / (math.log(1 / eps) + math.log(2.0))
    se = math.sqrt(p_hi * (1 - p_hi) / n)
    ok = ok and (p_lo - 4 * se <= frac <= p_hi + 4 * se)
    assert report(
        "9 irregular point: diagnosis unknown + measured mass",
        ok,
        f"puncture status unknown, exit mass {frac:.4f} in predicted [{p_lo - 4 * se:.4f}, {p_hi + 4 * se:.4f}]",
    )


def test_criterion_10_worker_count_determinism(tmp_path):
    import json

    cfg = {
        "domain": {"type": "ball", "center": [0.0, 0.0], "radius": 1.0},
        "boundary": {"type": "coordinate", "index": 0},
        "points": [[0.3, 0.0], [0.0, 0.5], [-0.2, -0.4]],
        "sampling": {"n_samples": 5000, "seed": 77},
    }
    path = tmp_path / "solve.json"
    path.write_text(json.dumps(cfg))
    outputs = []
    for workers in (1, 4, 8):
        out = tmp_path / f"out{workers}.csv"
        code = cli.main(["solve", str(path), "--workers", str(workers), "--out", str(out)])
        assert code == cli.EXIT_OK
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1] == outputs[2]
    assert report("10 worker-count determinism", ok, "byte-identical CSV for workers 1, 4, 8")


def test_criterion_11_one_dimensional_reduction():
    interval = AxisBox([0.0], [1.0])
    ok = True
    worst = 0.0
    for k, v in enumerate((0.1, 0.5, 0.9)):
        est = estimate_point(interval, Coordinate(0), [v], PARAMS, 100_000, SEED, index_offset=k * 100_000)
        gap = abs(est.mean - v)
        tol = 3.0 * est.stderr + 0.005
        ok = ok and gap <= tol
        worst = max(worst, gap)
    assert report("11 one-dimensional reduction", ok, f"worst |estimate - v| = {worst:.2e} over v in (0.1, 0.5, 0.9)")
