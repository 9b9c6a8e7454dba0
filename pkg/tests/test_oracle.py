import math

import numpy as np
import pytest

from dirichlet_mc import (
    Annulus,
    AxisBox,
    Ball,
    BarrierSpec,
    Constant,
    Coordinate,
    FourierCircle,
    HarmonicPoly2D,
    PiecewiseLabel,
    PuncturedBall,
    analytic_solution,
    barrier_value,
    eval_boundary,
    fd_solve,
    regularity_report,
    verify_barrier,
)
from dirichlet_mc.geometry import NotOnBoundaryError
from dirichlet_mc.oracle import (
    REGULAR_STATUS,
    UNKNOWN_STATUS,
    classify_boundary_patch,
    equidistributed_sphere_points,
    eval_boundary_many,
    sample_interior,
    sphere_quadrature,
    validate_pairing,
)
from dirichlet_mc.sampling import derive_stream


def test_eval_examples(domains):
    ball = domains["ball2"]
    assert eval_boundary(Constant(7.0), [1.0, 0.0], ball) == 7.0
    assert eval_boundary(Coordinate(0), [0.6, 0.8], ball) == pytest.approx(0.6, abs=1e-15)
    assert eval_boundary(FourierCircle(a=(0.0, 0.0, 1.0)), [1.0, 0.0], ball) == pytest.approx(1.0, abs=1e-15)


def test_eval_rejects_off_boundary(domains):
    with pytest.raises(NotOnBoundaryError):
        eval_boundary(Constant(1.0), [0.5, 0.0], domains["ball2"])


def test_eval_piecewise_patches(domains):
    ann = domains["annulus"]
    f = PiecewiseLabel({"inner": 2.0, "outer": 5.0})
    assert eval_boundary(f, [1.0, 0.0], ann) == 2.0
    assert eval_boundary(f, [0.0, -2.0], ann) == 5.0

    punct = PuncturedBall([0.0, 0.0], 1.0, [0.0, 0.0])
    g = PiecewiseLabel({"sphere": 1.0, "puncture": 0.0})
    assert eval_boundary(g, [0.0, 0.0], punct) == 0.0
    assert eval_boundary(g, [0.0, 1.0], punct) == 1.0
    assert classify_boundary_patch(punct, [0.0, 0.0]) == "puncture"


def test_validate_pairing_errors(domains):
    with pytest.raises(ValueError):
        validate_pairing(FourierCircle(a=(1.0,)), domains["box2"])
    with pytest.raises(ValueError):
        validate_pairing(HarmonicPoly2D("xy"), domains["ball3"])
    with pytest.raises(ValueError):
        validate_pairing(PiecewiseLabel({"inner": 1.0}), domains["ball2"])
    with pytest.raises(ValueError, match="missing"):
        validate_pairing(PiecewiseLabel({"inner": 1.0}), domains["annulus"])
    with pytest.raises(ValueError):
        validate_pairing(Coordinate(2), domains["ball2"])
    validate_pairing(PiecewiseLabel({"inner": 1.0, "outer": 0.0}), domains["annulus"])


def test_analytic_examples(domains):
    ball = domains["ball2"]
    assert analytic_solution(ball, Coordinate(0), [0.3, 0.4]) == pytest.approx(0.3, abs=1e-15)
    assert analytic_solution(ball, FourierCircle(a=(0.0, 0.0, 1.0)), [0.5, 0.0]) == pytest.approx(0.25, abs=1e-15)
    assert analytic_solution(domains["interval"], Coordinate(0), [0.3]) == pytest.approx(0.3, abs=1e-15)
    assert analytic_solution(ball, Constant(4.5), [0.1, 0.1]) == 4.5
    assert analytic_solution(ball, HarmonicPoly2D("x2-y2"), [0.5, 0.2]) == pytest.approx(0.21, abs=1e-15)
    # no closed form on the punctured disk
    punct = domains["punctured"]
    assert analytic_solution(punct, PiecewiseLabel({"sphere": 1.0, "puncture": 0.0}), [0.6, 0.0]) is None


def test_annulus_radial_solution(domains):
    ann = domains["annulus"]
    f = PiecewiseLabel({"inner": 2.0, "outer": 5.0})
    assert analytic_solution(ann, f, [1.0, 0.0]) == pytest.approx(2.0, abs=1e-12)
    assert analytic_solution(ann, f, [0.0, 2.0]) == pytest.approx(5.0, abs=1e-12)
    mid = analytic_solution(ann, f, [1.5, 0.0])
    assert mid == pytest.approx(2.0 + 3.0 * math.log(1.5) / math.log(2.0), rel=1e-12)


@pytest.mark.parametrize(
    "domain_name,f",
    [
        ("ball2", Coordinate(0)),
        ("ball2", Constant(3.25)),
        ("ball2", FourierCircle(a=(0.1, 0.0, 1.0), b=(0.0, 0.5))),
        ("ball2", HarmonicPoly2D("x2-y2")),
        ("ball2", HarmonicPoly2D("xy")),
        ("box2", HarmonicPoly2D("x2-y2")),
        ("annulus", PiecewiseLabel({"inner": 2.0, "outer": 5.0})),
        ("interval", Coordinate(0)),
        ("polytope", Coordinate(1)),
    ],
)
def test_analytic_boundary_trace_matches_data(domains, domain_name, f):
    dom = domains[domain_name]
    pts = sample_interior(dom, 1_000, derive_stream(41, 0))
    boundary = np.array([dom.boundary_projection(p) for p in pts])
    values = eval_boundary_many(f, boundary, dom)
    for p, expected in zip(boundary, values):
        assert analytic_solution(dom, f, p) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "domain_name,f",
    [
        ("ball2", FourierCircle(a=(0.0, 0.0, 1.0))),
        ("ball2", FourierCircle(b=(0.0, 0.3, 0.0, 2.0))),
        ("annulus", PiecewiseLabel({"inner": 2.0, "outer": 5.0})),
    ],
)
def test_analytic_solutions_have_mean_value_property(domains, domain_name, f):
    # quadrature averages over contained spheres must reproduce the value
    dom = domains[domain_name]
    pts = sample_interior(dom, 10, derive_stream(43, 0))
    for x in pts:
        rho = 0.5 * dom.distance_to_boundary(x)
        nodes, weights = sphere_quadrature(x, rho, 1024, dom.dim)
        avg = weights @ np.array([analytic_solution(dom, f, z) for z in nodes])
        assert abs(avg - analytic_solution(dom, f, x)) <= 1e-8


def test_fourier_coefficient_cap():
    with pytest.raises(ValueError):
        FourierCircle(a=tuple([0.0] * 40))


def test_barrier_values():
    spec2 = BarrierSpec([1.0, 0.0], [1.2, 0.0], 0.2)
    assert abs(barrier_value(spec2, [1.0, 0.0])) <= 1e-12
    spec2u = BarrierSpec([0.0, 0.0], [1.0, 0.0], 1.0)
    assert barrier_value(spec2u, [1.0 - math.e, 0.0]) == pytest.approx(1.0, rel=1e-12)
    spec3 = BarrierSpec([1.0, 0.0, 0.0], [2.0, 0.0, 0.0], 1.0)
    assert barrier_value(spec3, [0.0, 0.0, 0.0]) == pytest.approx(1.0 - 1.0 / 2.0, rel=1e-12)
    with pytest.raises(ValueError):
        barrier_value(spec2, [1.2, 0.0])


def test_barrier_1d_extension():
    spec = BarrierSpec([1.0], [1.5], 0.5)
    assert abs(barrier_value(spec, [1.0])) <= 1e-15
    assert barrier_value(spec, [0.0]) == pytest.approx(1.0)


@pytest.mark.parametrize("dim", [2, 3])
def test_verify_barrier_passes_on_tangent_ball(dim):
    dom = Ball([0.0] * dim, 1.0)
    v = np.zeros(dim)
    v[0] = 1.0
    spec = BarrierSpec.from_boundary_point(dom, v)
    report = verify_barrier(dom, spec, n_samples=10_000, seed=1)
    assert report.zero_at_v and abs(report.value_at_v) <= 1e-12
    assert report.positive_away and report.min_value_away > 0
    assert report.mean_value_ok and report.max_mean_value_residual <= 1e-6
    assert report.passed


def test_verify_barrier_fails_for_center_inside():
    dom = Ball([0.0, 0.0], 1.0)
    bad = BarrierSpec([1.0, 0.0], [0.8, 0.0], 0.2)  # ball pokes into the domain
    report = verify_barrier(dom, bad, n_samples=4_000, seed=2)
    assert not report.positive_away and report.min_value_away < 0
    assert not report.passed


def test_sphere_quadrature_weights():
    for dim in (1, 2, 3):
        nodes, weights = sphere_quadrature(np.zeros(dim), 0.5, 1024, dim)
        assert weights.sum() == pytest.approx(1.0, rel=1e-12)
        assert np.allclose(np.linalg.norm(nodes, axis=1), 0.5, atol=1e-12)
    with pytest.raises(ValueError):
        sphere_quadrature(np.zeros(4), 1.0, 64, 4)


def test_equidistributed_sphere_points():
    pts1 = equidistributed_sphere_points([0.5], 0.25, 8, 1)
    assert np.allclose(sorted(pts1[:, 0]), [0.25, 0.75])
    pts2 = equidistributed_sphere_points([0.0, 0.0], 1.0, 64, 2)
    assert pts2.shape == (64, 2)
    assert np.allclose(np.linalg.norm(pts2, axis=1), 1.0, atol=1e-12)
    pts3 = equidistributed_sphere_points([0.0, 0.0, 0.0], 2.0, 128, 3)
    assert pts3.shape == (128, 3)
    assert np.allclose(np.linalg.norm(pts3, axis=1), 2.0, atol=1e-12)
    # well-spread: no two Fibonacci points collapse together
    gaps = np.linalg.norm(pts3[1:] - pts3[:-1], axis=1)
    assert gaps.min() > 0.1


def test_fd_constant_exact(domains):
    sol = fd_solve(domains["box2"], Constant(2.5), 1.0 / 16)
    assert np.all(sol.values == 2.5)


def test_fd_reproduces_harmonic_polynomial(domains):
    sol = fd_solve(domains["box2"], HarmonicPoly2D("x2-y2"), 1.0 / 64)
    X, Y = np.meshgrid(sol.xs, sol.ys, indexing="ij")
    exact = X**2 - Y**2
    assert np.abs(sol.values - exact).max() <= 5e-4


def test_fd_reproduces_coordinate(domains):
    sol = fd_solve(domains["box2"], Coordinate(0), 1.0 / 32)
    X, _ = np.meshgrid(sol.xs, sol.ys, indexing="ij")
    assert np.abs(sol.values - X).max() <= 5e-4


def test_fd_value_at_interpolates(domains):
    sol = fd_solve(domains["box2"], HarmonicPoly2D("x2-y2"), 1.0 / 64)
    assert sol.value_at([0.25, 0.25]) == pytest.approx(0.0, abs=1e-8)
    assert sol.value_at([0.75, 0.25]) == pytest.approx(0.5, abs=1e-3)
    assert sol.node_value(32, 32) == pytest.approx(0.0, abs=1e-8)


def test_fd_input_validation(domains):
    with pytest.raises(ValueError):
        fd_solve(domains["ball2"], Constant(0.0), 1.0 / 16)
    with pytest.raises(ValueError):
        fd_solve(domains["interval"], Constant(0.0), 1.0 / 16)
    with pytest.raises(ValueError):
        fd_solve(domains["box2"], Constant(0.0), 0.3)  # does not divide the sides
    with pytest.raises(RuntimeError):
        fd_solve(domains["box2"], HarmonicPoly2D("x2-y2"), 1.0 / 32, tol=1e-12, max_iters=3)


def test_regularity_report(domains):
    ball_entries = regularity_report(domains["ball2"], [[1.0, 0.0]])
    assert ball_entries[0].status == REGULAR_STATUS
    assert ball_entries[0].certificate.passed

    corner = regularity_report(domains["box2"], [[0.0, 0.0]])
    assert corner[0].status == REGULAR_STATUS

    punct = PuncturedBall([0.0, 0.0], 1.0, [0.0, 0.0])
    entries = regularity_report(punct, [[0.0, 0.0], [1.0, 0.0]])
    assert entries[0].status == UNKNOWN_STATUS  # sufficient test only: never "irregular"
    assert entries[1].status == REGULAR_STATUS

    with pytest.raises(NotOnBoundaryError):
        regularity_report(domains["ball2"], [[0.5, 0.0]])
