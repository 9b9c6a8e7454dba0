"""Ground-truth machinery used to validate the Monte Carlo estimator.

Contents:

* a catalog of boundary data (constants, coordinates, degree-2 harmonic
  polynomials, Fourier data on circles, piecewise labels on disconnected
  boundary components),
* closed-form solutions for the catalog cases that admit them,
* barrier functions built from exterior tangent balls, with a numerical
  verifier (sign checks plus a spectral sphere-quadrature mean-value test),
* an independent finite-difference solver on 2-D boxes (successive
  over-relaxation), deliberately sharing no code with the walk estimator,
* a per-point boundary regularity report.

The regularity report only ever answers "regular (Poincaré)" or "unknown":
the exterior-ball condition is sufficient for regularity, not necessary, so
the absence of a certificate proves nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    BOUNDARY_TOL,
    Annulus,
    AxisBox,
    Ball,
    Domain,
    ExteriorBall,
    HalfspacePolytope,
    NotOnBoundaryError,
    PuncturedBall,
    as_point,
)
from .sampling import RngStream, derive_stream

REGULAR_STATUS = "regular (Poincaré)"
UNKNOWN_STATUS = "unknown"

_FOURIER_MAX_K = 32


# ---------------------------------------------------------------------------
# Boundary data catalog


@dataclass(frozen=True, eq=False)
class Constant:
    value: float


@dataclass(frozen=True, eq=False)
class Coordinate:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"coordinate index must be >= 0, got {self.index}")


@dataclass(frozen=True, eq=False)
class HarmonicPoly2D:
    """One of the degree-2 harmonic polynomials x^2 - y^2 or xy, as boundary data."""

    kind: str

    def __post_init__(self):
        if self.kind not in ("x2-y2", "xy"):
            raise ValueError(f"unknown harmonic polynomial kind {self.kind!r}; use 'x2-y2' or 'xy'")


@dataclass(frozen=True, eq=False)
class FourierCircle:
    """f(theta) = sum_k a_k cos(k theta) + b_k sin(k theta) on a circle boundary.

    Coefficient lists are indexed from k = 0; only pairs with a 2-D ball.
    """

    a: tuple = ()
    b: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        if max(len(self.a), len(self.b)) > _FOURIER_MAX_K + 1:
            raise ValueError(f"fourier data capped at k <= {_FOURIER_MAX_K}")


@dataclass(frozen=True, eq=False)
class PiecewiseLabel:
    """Constant value per boundary patch; only for domains whose boundary
    splits into separated components (annulus circles, sphere plus puncture)."""

    values: dict

    def __post_init__(self):
        object.__setattr__(self, "values", {str(k): float(v) for k, v in dict(self.values).items()})


BoundaryFunction = Constant | Coordinate | HarmonicPoly2D | FourierCircle | PiecewiseLabel


def boundary_patches(domain: Domain) -> tuple[str, ...]:
    """Patch identifiers for domains with disconnected boundary components."""
    if isinstance(domain, Annulus):
        return ("inner", "outer")
    if isinstance(domain, PuncturedBall):
        return ("sphere", "puncture")
    raise ValueError(f"domain {type(domain).__name__} has no separated boundary patches")


def classify_boundary_patch(domain: Domain, x) -> str:
    p = as_point(x, domain.dim)
    if isinstance(domain, Annulus):
        r = float(np.linalg.norm(p - domain.center))
        return "inner" if abs(r - domain.r_in) <= abs(r - domain.r_out) else "outer"
    if isinstance(domain, PuncturedBall):
        if np.linalg.norm(p - domain.puncture) <= BOUNDARY_TOL:
            return "puncture"
        return "sphere"
    raise ValueError(f"domain {type(domain).__name__} has no separated boundary patches")


def validate_pairing(f: BoundaryFunction, domain: Domain) -> None:
    """Raise if ``f`` is not continuous admissible data for ``domain``."""
    if isinstance(f, Coordinate) and f.index >= domain.dim:
        raise ValueError(f"coordinate index {f.index} out of range for dimension {domain.dim}")
    if isinstance(f, HarmonicPoly2D) and domain.dim != 2:
        raise ValueError("harmonic polynomial data requires a 2-D domain")
    if isinstance(f, FourierCircle) and not (isinstance(domain, Ball) and domain.dim == 2):
        raise ValueError("fourier data requires a 2-D ball domain")
    if isinstance(f, PiecewiseLabel):
        patches = boundary_patches(domain)  # raises for domains without patches
        missing = set(patches) - set(f.values)
        extra = set(f.values) - set(patches)
        if missing or extra:
            raise ValueError(
                f"piecewise data must cover exactly the patches {patches}; missing={sorted(missing)} unknown={sorted(extra)}"
            )


def _fourier_angle(domain: Ball, X: np.ndarray) -> np.ndarray:
    v = X - domain.center
    return np.arctan2(v[:, 1], v[:, 0])


def eval_boundary_many(f: BoundaryFunction, X: np.ndarray, domain: Domain) -> np.ndarray:
    """Evaluate boundary data at rows of X, assumed already on the boundary."""
    if isinstance(f, Constant):
        return np.full(X.shape[0], f.value)
    if isinstance(f, Coordinate):
        if f.index >= X.shape[1]:
            raise ValueError(f"coordinate index {f.index} out of range for dimension {X.shape[1]}")
        return X[:, f.index].copy()
    if isinstance(f, HarmonicPoly2D):
        if X.shape[1] != 2:
            raise ValueError("harmonic polynomial data requires a 2-D domain")
        if f.kind == "x2-y2":
            return X[:, 0] ** 2 - X[:, 1] ** 2
        return X[:, 0] * X[:, 1]
    if isinstance(f, FourierCircle):
        if not (isinstance(domain, Ball) and domain.dim == 2):
            raise ValueError("fourier data requires a 2-D ball domain")
        theta = _fourier_angle(domain, X)
        out = np.zeros(X.shape[0])
        for k, ak in enumerate(f.a):
            if ak:
                out += ak * np.cos(k * theta)
        for k, bk in enumerate(f.b):
            if bk:
                out += bk * np.sin(k * theta)
        return out
    if isinstance(f, PiecewiseLabel):
        validate_pairing(f, domain)
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            out[i] = f.values[classify_boundary_patch(domain, row)]
        return out
    raise TypeError(f"unknown boundary function {type(f)!r}")


def eval_boundary(f: BoundaryFunction, x, domain: Domain) -> float:
    """Evaluate boundary data at a point of the boundary (checked to 1e-9)."""
    p = as_point(x, domain.dim)
    if domain.boundary_distance(p) > BOUNDARY_TOL:
        raise NotOnBoundaryError(f"point {p.tolist()} is not on the domain boundary")
    return float(eval_boundary_many(f, p[None, :], domain)[0])


# ---------------------------------------------------------------------------
# Closed-form solutions


def _radial_profile(rho: float, dim: int) -> float:
    if dim == 1:
        return rho
    if dim == 2:
        return math.log(rho)
    return -(rho ** (2 - dim))


def analytic_solution(domain: Domain, f: BoundaryFunction, x) -> float | None:
    """Exact solution value for catalog cases that admit one, else None.

    Catalog: constants; coordinate functions (their harmonic extension is the
    coordinate itself); 2-D harmonic polynomials; Fourier data on a 2-D ball
    (scaled Fourier series); piecewise-constant data on an annulus (radial
    solution).  The punctured ball deliberately has no entry: its boundary
    value problem has no classical solution.
    """
    p = as_point(x, domain.dim)
    if isinstance(f, Constant):
        return float(f.value)
    if isinstance(f, Coordinate):
        if f.index >= domain.dim:
            raise ValueError(f"coordinate index {f.index} out of range for dimension {domain.dim}")
        return float(p[f.index])
    if isinstance(f, HarmonicPoly2D) and domain.dim == 2:
        if f.kind == "x2-y2":
            return float(p[0] ** 2 - p[1] ** 2)
        return float(p[0] * p[1])
    if isinstance(f, FourierCircle) and isinstance(domain, Ball) and domain.dim == 2:
        v = p - domain.center
        rho = float(np.linalg.norm(v))
        theta = math.atan2(v[1], v[0])
        total = 0.0
        for k, ak in enumerate(f.a):
            if ak:
                total += ak * (rho / domain.radius) ** k * math.cos(k * theta)
        for k, bk in enumerate(f.b):
            if bk:
                total += bk * (rho / domain.radius) ** k * math.sin(k * theta)
        return total
    if isinstance(f, PiecewiseLabel) and isinstance(domain, Annulus):
        rho = float(np.linalg.norm(p - domain.center))
        rho = min(max(rho, domain.r_in), domain.r_out)
        s, s_in, s_out = (_radial_profile(t, domain.dim) for t in (rho, domain.r_in, domain.r_out))
        v_in, v_out = f.values["inner"], f.values["outer"]
        return v_in + (v_out - v_in) * (s - s_in) / (s_out - s_in)
    return None


# ---------------------------------------------------------------------------
# Barriers and exterior-ball certificates


@dataclass(frozen=True, eq=False)
class BarrierSpec:
    """A boundary point with its exterior tangent ball (center u, radius s)."""

    v: np.ndarray
    u: np.ndarray
    s: float

    def __post_init__(self):
        object.__setattr__(self, "v", as_point(self.v))
        object.__setattr__(self, "u", as_point(self.u, self.v.size))
        if not self.s > 0:
            raise ValueError(f"exterior ball radius must be > 0, got {self.s}")

    @property
    def dim(self) -> int:
        return self.v.size

    @classmethod
    def from_boundary_point(cls, domain: Domain, v) -> "BarrierSpec | None":
        ball = domain.exterior_ball(v)
        if ball is None:
            return None
        return cls(as_point(v, domain.dim), ball.center, ball.radius)


def barrier_value_many(spec: BarrierSpec, X: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(X - spec.u, axis=1)
    if np.any(r == 0.0):
        raise ValueError("barrier is singular at the exterior ball center")
    d = spec.dim
    if d == 1:
        return r - spec.s  # 1-D analogue of the log/power barriers; see docs
    if d == 2:
        return np.log(r / spec.s)
    return spec.s ** (2 - d) - r ** (2 - d)


def barrier_value(spec: BarrierSpec, x) -> float:
    """Barrier at x: log(|x-u|/s) in 2-D, s^(2-d) - |x-u|^(2-d) in d >= 3.

    Zero exactly on the sphere of the exterior ball (in particular at the
    certified boundary point), positive outside it, harmonic away from u.
    """
    return float(barrier_value_many(spec, as_point(x, spec.dim)[None, :])[0])


def sphere_quadrature(center, radius: float, n: int, dim: int):
    """Nodes and weights averaging a function over a sphere.

    1-D: the two endpoints.  2-D: n equally spaced angles (trapezoid rule,
    spectrally accurate for smooth integrands).  3-D: Gauss-Legendre nodes in
    the polar cosine crossed with equally spaced azimuths.  Higher dimensions
    are not needed here and raise.
    """
    c = as_point(center, dim)
    if dim == 1:
        pts = np.array([[c[0] - radius], [c[0] + radius]])
        return pts, np.array([0.5, 0.5])
    if dim == 2:
        ang = 2.0 * np.pi * np.arange(n) / n
        pts = c + radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return pts, np.full(n, 1.0 / n)
    if dim == 3:
        n_polar = max(4, int(round(math.sqrt(n))))
        n_az = max(4, n // n_polar)
        t, w = np.polynomial.legendre.leggauss(n_polar)
        ang = 2.0 * np.pi * np.arange(n_az) / n_az
        sint = np.sqrt(1.0 - t**2)
        pts = np.empty((n_polar * n_az, 3))
        weights = np.empty(n_polar * n_az)
        for i in range(n_polar):
            rows = slice(i * n_az, (i + 1) * n_az)
            pts[rows, 0] = c[0] + radius * sint[i] * np.cos(ang)
            pts[rows, 1] = c[1] + radius * sint[i] * np.sin(ang)
            pts[rows, 2] = c[2] + radius * t[i]
            weights[rows] = (w[i] / 2.0) / n_az
        return pts, weights
    raise ValueError(f"sphere quadrature implemented for dimensions 1-3, got {dim}")


def equidistributed_sphere_points(center, radius: float, k: int, dim: int) -> np.ndarray:
    """k well-spread sphere points: endpoints (1-D), equal angles (2-D), Fibonacci spiral (3-D)."""
    c = as_point(center, dim)
    if k < 1:
        raise ValueError(f"need at least one sphere point, got k={k}")
    if dim == 1:
        return np.array([[c[0] - radius], [c[0] + radius]])
    if dim == 2:
        ang = 2.0 * np.pi * np.arange(k) / k
        return c + radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if dim == 3:
        i = np.arange(k)
        z = 1.0 - (2.0 * i + 1.0) / k
        phi = i * math.pi * (3.0 - math.sqrt(5.0))
        s = np.sqrt(1.0 - z**2)
        return c + radius * np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)
    raise ValueError(f"sphere point sets implemented for dimensions 1-3, got {dim}")


def sample_interior(domain: Domain, n: int, stream: RngStream) -> np.ndarray:
    """n interior points by rejection from the bounding box."""
    lo, hi = domain.bounding_box()
    out = np.empty((n, domain.dim))
    filled = 0
    while filled < n:
        cand = stream.uniform(size=(2 * (n - filled) + 8, domain.dim)) * (hi - lo) + lo
        keep = cand[domain.contains_many(cand)]
        take = min(len(keep), n - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return out


def sample_closure(domain: Domain, n: int, stream: RngStream) -> np.ndarray:
    """n points of the domain closure: half interior, half projected to the boundary."""
    inner = sample_interior(domain, n - n // 2, stream)
    shell = sample_interior(domain, n // 2, stream)
    boundary = np.array([domain.boundary_projection(p) for p in shell])
    return np.vstack([inner, boundary]) if len(boundary) else inner


@dataclass(frozen=True)
class BarrierReport:
    value_at_v: float
    zero_at_v: bool
    min_value_away: float
    positive_away: bool
    max_mean_value_residual: float
    mean_value_ok: bool
    n_samples: int

    @property
    def passed(self) -> bool:
        return self.zero_at_v and self.positive_away and self.mean_value_ok


def verify_barrier(
    domain: Domain,
    spec: BarrierSpec,
    n_samples: int = 10_000,
    seed: int = 0,
    quadrature_points: int = 1024,
) -> BarrierReport:
    """Check the defining barrier properties numerically.

    (a) value 0 at the certified point (to 1e-12); (b) strictly positive at
    sampled points of the closure away from it; (c) harmonicity via the mean
    value property, tested by sphere quadrature at interior points kept away
    from the barrier's singularity (residual <= 1e-6).
    """
    if spec.dim > 3:
        raise ValueError("barrier verification quadrature covers dimensions 1-3")
    stream = derive_stream(seed, 0)
    val_v = barrier_value(spec, spec.v)
    zero_ok = abs(val_v) <= 1e-12

    pts = sample_closure(domain, n_samples, stream)
    away = np.linalg.norm(pts - spec.v, axis=1) > 1e-6
    vals = barrier_value_many(spec, pts[away])
    min_away = float(vals.min()) if vals.size else float("inf")
    positive_ok = bool(vals.size) and min_away > 0.0

    diam = domain.diameter()
    centers = []
    cand = sample_interior(domain, 64 * 10, stream)
    gaps = domain.interior_distance_many(cand)
    for p, gap in zip(cand, gaps):
        if gap >= 0.05 * diam and np.linalg.norm(p - spec.u) >= 0.05 * diam:
            centers.append((p, gap))
        if len(centers) == 10:
            break
    max_resid = 0.0
    for p, gap in centers:
        rho = 0.5 * gap
        nodes, weights = sphere_quadrature(p, rho, quadrature_points, spec.dim)
        avg = float(weights @ barrier_value_many(spec, nodes))
        max_resid = max(max_resid, abs(avg - barrier_value(spec, p)))
    mvp_ok = bool(centers) and max_resid <= 1e-6

    return BarrierReport(val_v, zero_ok, min_away, positive_ok, max_resid, mvp_ok, n_samples)


# ---------------------------------------------------------------------------
# Finite-difference oracle (independent of the walk estimator)


@dataclass(frozen=True, eq=False)
class FdSolution:
    """Grid solution of the 5-point discrete Laplace equation on a 2-D box."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # shape (len(xs), len(ys))
    iterations: int
    residual: float

    def node_value(self, i: int, j: int) -> float:
        return float(self.values[i, j])

    def value_at(self, point) -> float:
        """Bilinear interpolation; exact at nodes."""
        p = as_point(point, 2)
        hx = self.xs[1] - self.xs[0]
        hy = self.ys[1] - self.ys[0]
        fx = np.clip((p[0] - self.xs[0]) / hx, 0.0, len(self.xs) - 1.0)
        fy = np.clip((p[1] - self.ys[0]) / hy, 0.0, len(self.ys) - 1.0)
        i0, j0 = min(int(fx), len(self.xs) - 2), min(int(fy), len(self.ys) - 2)
        tx, ty = fx - i0, fy - j0
        v = self.values
        return float(
            (1 - tx) * (1 - ty) * v[i0, j0]
            + tx * (1 - ty) * v[i0 + 1, j0]
            + (1 - tx) * ty * v[i0, j0 + 1]
            + tx * ty * v[i0 + 1, j0 + 1]
        )


def fd_solve(
    domain: AxisBox,
    f: BoundaryFunction,
    grid_spacing: float,
    tol: float = 1e-10,
    omega: float = 1.9,
    max_iters: int = 100_000,
) -> FdSolution:
    """Solve the discrete Laplace equation on a 2-D box by red-black SOR.

    ``grid_spacing`` must divide both side lengths.  Iterates until the
    maximum nodal residual |mean(neighbors) - u| drops below ``tol``; failure
    to converge within the iteration cap raises, since it indicates a setup
    bug rather than a property of the problem.
    """
    if not (isinstance(domain, AxisBox) and domain.dim == 2):
        raise ValueError("finite-difference oracle requires a 2-D axis box")
    sides = domain.hi - domain.lo
    counts = sides / grid_spacing
    n = np.rint(counts).astype(int)
    if np.any(np.abs(counts - n) > 1e-9) or np.any(n < 2):
        raise ValueError(f"grid spacing {grid_spacing} must divide the box sides {sides.tolist()}")
    nx, ny = int(n[0]), int(n[1])
    xs = domain.lo[0] + grid_spacing * np.arange(nx + 1)
    ys = domain.lo[1] + grid_spacing * np.arange(ny + 1)

    U = np.zeros((nx + 1, ny + 1))
    for i in (0, nx):
        pts = np.stack([np.full(ny + 1, xs[i]), ys], axis=1)
        U[i, :] = eval_boundary_many(f, pts, domain)
    for j in (0, ny):
        pts = np.stack([xs, np.full(nx + 1, ys[j])], axis=1)
        U[:, j] = eval_boundary_many(f, pts, domain)
    U[1:-1, 1:-1] = U[np.ix_((0, nx), (0, ny))].mean()

    ii, jj = np.meshgrid(np.arange(1, nx), np.arange(1, ny), indexing="ij")
    red = (ii + jj) % 2 == 0
    interior = np.s_[1:-1, 1:-1]

    def neighbor_mean():
        return 0.25 * (U[2:, 1:-1] + U[:-2, 1:-1] + U[1:-1, 2:] + U[1:-1, :-2])

    iterations = 0
    residual = float("inf")
    while iterations < max_iters:
        for mask in (red, ~red):
            nm = neighbor_mean()
            block = U[interior]
            block[mask] += omega * (nm[mask] - block[mask])
        iterations += 1
        if iterations % 8 == 0 or iterations <= 2:
            residual = float(np.abs(neighbor_mean() - U[interior]).max())
            if residual <= tol:
                break
    else:
        raise RuntimeError(f"SOR failed to reach tol={tol} within {max_iters} iterations (residual {residual})")
    return FdSolution(xs, ys, U, iterations, residual)


# ---------------------------------------------------------------------------
# Regularity diagnostics


@dataclass(frozen=True, eq=False)
class RegularityEntry:
    point: np.ndarray
    status: str
    exterior: ExteriorBall | None = None
    certificate: BarrierReport | None = field(default=None, repr=False)


def regularity_report(
    domain: Domain,
    boundary_points,
    certify: bool = True,
    n_certificate_samples: int = 2000,
    seed: int = 0,
) -> list[RegularityEntry]:
    """Classify boundary points as certified regular or unknown.

    A point gets "regular (Poincaré)" when an exterior tangent ball exists
    (the induced barrier is then verified as a certificate); otherwise
    "unknown".  "Irregular" is never reported: the exterior-ball test is
    one-sided.
    """
    entries = []
    for v in boundary_points:
        p = domain._check_boundary(v)
        ball = domain.exterior_ball(p)
        if ball is None:
            entries.append(RegularityEntry(p, UNKNOWN_STATUS))
            continue
        certificate = None
        if certify:
            spec = BarrierSpec(p, ball.center, ball.radius)
            certificate = verify_barrier(domain, spec, n_samples=n_certificate_samples, seed=seed)
            if not certificate.passed:
                entries.append(RegularityEntry(p, UNKNOWN_STATUS, ball, certificate))
                continue
        entries.append(RegularityEntry(p, REGULAR_STATUS, ball, certificate))
    return entries
