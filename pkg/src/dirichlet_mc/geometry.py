"""Exact geometric queries for a closed catalog of bounded open domains in R^d.

Every domain variant answers the same queries in closed form: strict
containment, distance from an interior point to the boundary, nearest-point
projection onto the boundary, diameter, and (where one exists) an exterior
tangent ball certifying boundary regularity.

The catalog is deliberately closed.  Min-combinations of distance fields are
only lower bounds for general unions/intersections, and the random walk
needs the true distance to the boundary; convex set algebra is covered
exactly by ``HalfspacePolytope``.

Projection ties (equidistant boundary sets) are broken deterministically:
candidate nearest points are compared lexicographically and the smallest
wins; at an exact sphere center, where the nearest direction is undefined,
the +x0 axis is used.  Runs are therefore reproducible bit for bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

BOUNDARY_TOL = 1e-9


class DimensionMismatchError(ValueError):
    """Point dimension does not match the domain's ambient dimension."""


class OutsideDomainError(ValueError):
    """A query that requires an interior point received one outside."""


class NotOnBoundaryError(ValueError):
    """A query that requires a boundary point received one off the boundary."""


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Validate and convert ``x`` to a 1-D float array (finite coordinates)."""
    p = np.asarray(x, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"point must be a 1-D coordinate sequence, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point has non-finite coordinates: {p}")
    if dim is not None and p.size != dim:
        raise DimensionMismatchError(f"point has dimension {p.size}, domain has dimension {dim}")
    return p


def _vnorm(v: np.ndarray) -> float:
    """Euclidean norm of a 1-D vector via multiply-sum.

    np.linalg.norm on 1-D input routes through a BLAS dot whose rounding can
    differ from the batched axis-1 norms used by the vectorized walk runner;
    this form keeps scalar and batched trajectories bit-identical.
    """
    return float(np.sqrt((v * v).sum()))


def _unit_from(v: np.ndarray) -> np.ndarray:
    """Unit vector along v, +x0 at the origin.

    Rescales first when ||v|| would square into the subnormal range, where the
    plain multiply-sum norm loses precision.  Healthy inputs take the same
    arithmetic as the batched walk runner, keeping trajectories bit-identical.
    """
    m = float(np.abs(v).max())
    if m == 0.0:
        e = np.zeros(v.size)
        e[0] = 1.0
        return e
    if m < 1e-150:
        v = v / m
    return v / _vnorm(v)


def _lex_min(points: list[np.ndarray]) -> np.ndarray:
    return min(points, key=lambda q: tuple(q))


def _pick_candidate(cands: list[tuple[float, np.ndarray]]) -> tuple[float, np.ndarray]:
    """Min-distance candidate; exact distance ties break to the lexicographically smallest foot."""
    dmin = min(d for d, _ in cands)
    feet = [foot for d, foot in cands if d == dmin]
    return dmin, _lex_min(feet)


@dataclass(frozen=True, eq=False)
class ExteriorBall:
    """A ball whose closure meets the domain closure in exactly one boundary point."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise ValueError(f"exterior ball radius must be > 0, got {self.radius}")


class _DomainBase:
    """Shared argument checking for the catalog variants."""

    dim: int

    def _check_interior(self, x) -> np.ndarray:
        p = as_point(x, self.dim)
        if not self.contains(p):
            raise OutsideDomainError(f"point {p.tolist()} is not in the interior of {self!r}")
        return p

    def _check_boundary(self, x) -> np.ndarray:
        p = as_point(x, self.dim)
        if self.boundary_distance(p) > BOUNDARY_TOL:
            raise NotOnBoundaryError(f"point {p.tolist()} is not on the boundary of {self!r}")
        return p

    def contains(self, x) -> bool:
        p = as_point(x, self.dim)
        return bool(self.contains_many(p[None, :])[0])

    def distance_to_boundary(self, x) -> float:
        """Distance from an interior point to the boundary (strictly positive)."""
        p = self._check_interior(x)
        return float(self.interior_distance_many(p[None, :])[0])

    # Subclasses implement:
    #   contains_many(X) -> bool array
    #   interior_distance_many(X) -> float array   (valid for interior rows)
    #   boundary_distance(x) -> float              (any point)
    #   project_to_boundary(x), boundary_projection(x)
    #   diameter(), bounding_box(), exterior_ball(v)


@dataclass(frozen=True, eq=False)
class Ball(_DomainBase):
    """Open ball ``{x : ||x - center|| < radius}``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.size

    def contains_many(self, X) -> np.ndarray:
        r = np.linalg.norm(X - self.center, axis=1)
        return r < self.radius

    def interior_distance_many(self, X) -> np.ndarray:
        return self.radius - np.linalg.norm(X - self.center, axis=1)

    def boundary_distance(self, x) -> float:
        p = as_point(x, self.dim)
        return abs(self.radius - _vnorm(p - self.center))

    def boundary_projection(self, x) -> np.ndarray:
        p = as_point(x, self.dim)
        return self.center + self.radius * _unit_from(p - self.center)

    def project_to_boundary(self, x) -> np.ndarray:
        p = self._check_interior(x)
        return self.boundary_projection(p)

    def diameter(self) -> float:
        return 2.0 * self.radius

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.radius, self.center + self.radius

    def exterior_ball(self, v) -> ExteriorBall:
        p = self._check_boundary(v)
        s = self.diameter() / 10.0
        direction = (p - self.center) / _vnorm(p - self.center)
        return ExteriorBall(self.center + (self.radius + s) * direction, s)


@dataclass(frozen=True, eq=False)
class AxisBox(_DomainBase):
    """Open axis-aligned box ``{x : lo_i < x_i < hi_i}``."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", as_point(self.lo))
        object.__setattr__(self, "hi", as_point(self.hi, self.lo.size))
        if not np.all(self.lo < self.hi):
            raise ValueError(f"box requires lo < hi componentwise, got lo={self.lo.tolist()} hi={self.hi.tolist()}")

    @property
    def dim(self) -> int:
        return self.lo.size

    def contains_many(self, X) -> np.ndarray:
        return np.all((X > self.lo) & (X < self.hi), axis=1)

    def interior_distance_many(self, X) -> np.ndarray:
        return np.minimum((X - self.lo).min(axis=1), (self.hi - X).min(axis=1))

    def boundary_distance(self, x) -> float:
        p = as_point(x, self.dim)
        clamped = np.clip(p, self.lo, self.hi)
        outside = float(np.linalg.norm(p - clamped))
        if outside > 0.0:
            return outside
        return float(min((p - self.lo).min(), (self.hi - p).min()))

    def _interior_projection(self, p: np.ndarray) -> np.ndarray:
        cands = []
        for j in range(self.dim):
            foot = p.copy()
            foot[j] = self.lo[j]
            cands.append((float(p[j] - self.lo[j]), foot))
            foot = p.copy()
            foot[j] = self.hi[j]
            cands.append((float(self.hi[j] - p[j]), foot))
        return _pick_candidate(cands)[1]

    def boundary_projection(self, x) -> np.ndarray:
        p = as_point(x, self.dim)
        clamped = np.clip(p, self.lo, self.hi)
        if np.any(clamped != p) or not self.contains(p):
            return clamped  # outside or already on a face: clamping lands on the boundary
        return self._interior_projection(p)

    def project_to_boundary(self, x) -> np.ndarray:
        return self._interior_projection(self._check_interior(x))

    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lo.copy(), self.hi.copy()

    def exterior_ball(self, v) -> ExteriorBall:
        p = self._check_boundary(v)
        normal = np.zeros(self.dim)
        for j in range(self.dim):
            if abs(p[j] - self.lo[j]) <= BOUNDARY_TOL:
                normal[j] -= 1.0
            if abs(p[j] - self.hi[j]) <= BOUNDARY_TOL:
                normal[j] += 1.0
        # p within tolerance of the boundary but outside every face only if off-box; already excluded
        norm = float(np.linalg.norm(normal))
        if norm == 0.0:
            raise NotOnBoundaryError(f"point {p.tolist()} touches no face of {self!r}")
        s = self.diameter() / 10.0
        return ExteriorBall(p + s * normal / norm, s)


@dataclass(frozen=True, eq=False)
class HalfspacePolytope(_DomainBase):
    """Bounded intersection of open halfspaces ``{x : normals_i . x < offsets_i}``.

    Normals are renormalized to unit length on construction (offsets rescaled
    accordingly, which leaves each halfspace unchanged).  Construction verifies
    the interior is nonempty (Chebyshev center) and the set is bounded
    (coordinate-wise linear programs), and enumerates the vertices for the
    exact diameter.
    """

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.normals, dtype=float)
        b = np.asarray(self.offsets, dtype=float)
        if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.size:
            raise ValueError("normals must be (m, d) with matching offsets (m,)")
        if A.shape[0] < A.shape[1] + 1:
            raise ValueError(f"a bounded polytope in R^{A.shape[1]} needs at least {A.shape[1] + 1} faces")
        scale = np.linalg.norm(A, axis=1)
        if np.any(scale == 0.0):
            raise ValueError("zero normal vector in polytope faces")
        object.__setattr__(self, "normals", A / scale[:, None])
        object.__setattr__(self, "offsets", b / scale)
        self._validate()

    def _validate(self):
        from scipy.optimize import linprog

        A, b, d = self.normals, self.offsets, self.dim
        bounds = [(None, None)] * d
        # Chebyshev center: max t s.t. A x + t <= b
        res = linprog(
            c=np.r_[np.zeros(d), -1.0],
            A_ub=np.c_[A, np.ones(len(b))],
            b_ub=b,
            bounds=bounds + [(0, None)],
            method="highs",
        )
        if res.status != 0 or res.x[-1] <= 0:
            raise ValueError("polytope has empty interior")
        object.__setattr__(self, "_chebyshev_center", res.x[:d].copy())
        lo = np.empty(d)
        hi = np.empty(d)
        for j in range(d):
            c = np.zeros(d)
            c[j] = 1.0
            for sign, dest in ((1.0, lo), (-1.0, hi)):
                r = linprog(c=sign * c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
                if r.status == 3:
                    raise ValueError("polytope is unbounded")
                if r.status != 0:
                    raise ValueError(f"polytope validation failed (LP status {r.status})")
                dest[j] = -r.fun if sign < 0 else r.fun
        object.__setattr__(self, "_bbox", (lo, hi))
        object.__setattr__(self, "_vertices", self._enumerate_vertices())

    def _enumerate_vertices(self) -> np.ndarray:
        A, b, d = self.normals, self.offsets, self.dim
        verts = []
        for idx in itertools.combinations(range(len(b)), d):
            sub = A[list(idx)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            x = np.linalg.solve(sub, b[list(idx)])
            if np.all(A @ x - b <= 1e-9):
                verts.append(x)
        if not verts:
            raise ValueError("polytope has no vertices; not a bounded polytope")
        verts = np.array(verts)
        # dedupe within tolerance
        keep = []
        for v in verts:
            if not any(np.linalg.norm(v - w) < 1e-9 for w in keep):
                keep.append(v)
        return np.array(keep)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices.copy()

    @property
    def chebyshev_center(self) -> np.ndarray:
        return self._chebyshev_center.copy()

    def _slacks_many(self, X) -> np.ndarray:
        # elementwise multiply-reduce instead of a BLAS matmul: GEMM kernels
        # round shape-dependently, which would make a walk's trajectory depend
        # on how many walks share its batch
        return self.offsets - (X[:, None, :] * self.normals[None, :, :]).sum(axis=2)

    def contains_many(self, X) -> np.ndarray:
        return np.all(self._slacks_many(X) > 0.0, axis=1)

    def interior_distance_many(self, X) -> np.ndarray:
        return self._slacks_many(X).min(axis=1)

    def boundary_distance(self, x) -> float:
        p = as_point(x, self.dim)
        slack = self._slacks_many(p[None, :])[0]
        if np.all(slack > 0):
            return float(slack.min())
        return float(np.linalg.norm(p - self.boundary_projection(p)))

    def _interior_projection(self, p: np.ndarray) -> np.ndarray:
        slack = self._slacks_many(p[None, :])[0]
        cands = [(float(s), p + s * a) for s, a in zip(slack, self.normals)]
        return _pick_candidate(cands)[1]

    def boundary_projection(self, x) -> np.ndarray:
        p = as_point(x, self.dim)
        slack = self._slacks_many(p[None, :])[0]
        if np.all(slack > 0):
            return self._interior_projection(p)
        # Outside: cyclic projection onto violated halfspaces.  Converges to the
        # nearest feasible point for the near-boundary points this is used on.
        q = p.copy()
        for _ in range(200):
            viol = self.normals @ q - self.offsets
            worst = int(np.argmax(viol))
            if viol[worst] <= 1e-15:
                break
            q = q - viol[worst] * self.normals[worst]
        return q

    def project_to_boundary(self, x) -> np.ndarray:
        return self._interior_projection(self._check_interior(x))

    def diameter(self) -> float:
        V = self._vertices
        diffs = V[:, None, :] - V[None, :, :]
        return float(np.sqrt((diffs**2).sum(axis=2)).max())

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self._bbox
        return lo.copy(), hi.copy()

    def exterior_ball(self, v) -> ExteriorBall:
        p = self._check_boundary(v)
        slack = self.offsets - self.normals @ p
        active = np.abs(slack) <= BOUNDARY_TOL
        if not np.any(active):
            raise NotOnBoundaryError(f"point {p.tolist()} touches no face of the polytope")
        normal = self.normals[active].sum(axis=0)
        norm = float(np.linalg.norm(normal))
        if norm == 0.0:
            raise NotOnBoundaryError("degenerate active-face normals")
        s = self.diameter() / 10.0
        return ExteriorBall(p + s * normal / norm, s)


@dataclass(frozen=True, eq=False)
class Annulus(_DomainBase):
    """Open annulus ``{x : r_in < ||x - center|| < r_out}``."""

    center: np.ndarray
    r_in: float
    r_out: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (0 < self.r_in < self.r_out):
            raise ValueError(f"annulus requires 0 < r_in < r_out, got {self.r_in}, {self.r_out}")

    @property
    def dim(self) -> int:
        return self.center.size

    def contains_many(self, X) -> np.ndarray:
        r = np.linalg.norm(X - self.center, axis=1)
        return (r > self.r_in) & (r < self.r_out)

    def interior_distance_many(self, X) -> np.ndarray:
        r = np.linalg.norm(X - self.center, axis=1)
        return np.minimum(r - self.r_in, self.r_out - r)

    def boundary_distance(self, x) -> float:
        p = as_point(x, self.dim)
        r = _vnorm(p - self.center)
        if r <= self.r_in:
            return self.r_in - r
        if r >= self.r_out:
            return r - self.r_out
        return min(r - self.r_in, self.r_out - r)

    def _radial_foot(self, p: np.ndarray, radius: float) -> np.ndarray:
        return self.center + radius * _unit_from(p - self.center)

    def boundary_projection(self, x) -> np.ndarray:
        p = as_point(x, self.dim)
        r = _vnorm(p - self.center)
        if r <= self.r_in:
            return self._radial_foot(p, self.r_in)
        if r >= self.r_out:
            return self._radial_foot(p, self.r_out)
        cands = [
            (r - self.r_in, self._radial_foot(p, self.r_in)),
            (self.r_out - r, self._radial_foot(p, self.r_out)),
        ]
        return _pick_candidate(cands)[1]

    def project_to_boundary(self, x) -> np.ndarray:
        return self.boundary_projection(self._check_interior(x))

    def diameter(self) -> float:
        return 2.0 * self.r_out

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.r_out, self.center + self.r_out

    def exterior_ball(self, v) -> ExteriorBall:
        p = self._check_boundary(v)
        r = _vnorm(p - self.center)
        direction = (p - self.center) / r
        if abs(r - self.r_out) <= BOUNDARY_TOL:
            s = self.diameter() / 10.0
            return ExteriorBall(self.center + (self.r_out + s) * direction, s)
        # inner circle: the certifying ball sits inside the hole
        s = min(self.diameter() / 10.0, self.r_in / 2.0)
        return ExteriorBall(self.center + (self.r_in - s) * direction, s)


@dataclass(frozen=True, eq=False)
class PuncturedBall(_DomainBase):
    """Open ball with one interior point removed: ``B_radius(center) \\ {puncture}``.

    The puncture is a boundary point of the resulting open set.  It admits no
    exterior ball, which is what makes this variant the catalog's example of a
    boundary point whose regularity cannot be certified.
    """

    center: np.ndarray
    radius: float
    puncture: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "puncture", as_point(self.puncture, self.center.size))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius}")
        if not np.linalg.norm(self.puncture - self.center) < self.radius:
            raise ValueError("puncture must lie strictly inside the ball")

    @property
    def dim(self) -> int:
        return self.center.size

    def contains_many(self, X) -> np.ndarray:
        inside = np.linalg.norm(X - self.center, axis=1) < self.radius
        at_puncture = np.all(X == self.puncture, axis=1)
        return inside & ~at_puncture

    def interior_distance_many(self, X) -> np.ndarray:
        to_sphere = self.radius - np.linalg.norm(X - self.center, axis=1)
        to_puncture = np.linalg.norm(X - self.puncture, axis=1)
        return np.minimum(to_sphere, to_puncture)

    def boundary_distance(self, x) -> float:
        p = as_point(x, self.dim)
        r = _vnorm(p - self.center)
        if r >= self.radius:
            return r - self.radius
        return min(self.radius - r, float(np.linalg.norm(p - self.puncture)))

    def _sphere_foot(self, p: np.ndarray) -> np.ndarray:
        return self.center + self.radius * _unit_from(p - self.center)

    def boundary_projection(self, x) -> np.ndarray:
        p = as_point(x, self.dim)
        r = _vnorm(p - self.center)
        if r >= self.radius:
            return self._sphere_foot(p)
        cands = [
            (self.radius - r, self._sphere_foot(p)),
            (_vnorm(p - self.puncture), self.puncture.copy()),
        ]
        return _pick_candidate(cands)[1]

    def project_to_boundary(self, x) -> np.ndarray:
        return self.boundary_projection(self._check_interior(x))

    def diameter(self) -> float:
        return 2.0 * self.radius

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.center - self.radius, self.center + self.radius

    def exterior_ball(self, v) -> ExteriorBall | None:
        p = self._check_boundary(v)
        if np.linalg.norm(p - self.puncture) <= BOUNDARY_TOL:
            return None  # every ball whose closure contains the puncture meets the domain closure elsewhere
        s = self.diameter() / 10.0
        direction = (p - self.center) / _vnorm(p - self.center)
        return ExteriorBall(self.center + (self.radius + s) * direction, s)


Domain = Ball | AxisBox | HalfspacePolytope | Annulus | PuncturedBall


def interior_anchor(domain: Domain) -> np.ndarray:
    """A canonical interior point, used as a default walk origin."""
    if isinstance(domain, Ball):
        return domain.center.copy()
    if isinstance(domain, AxisBox):
        return 0.5 * (domain.lo + domain.hi)
    if isinstance(domain, HalfspacePolytope):
        return domain.chebyshev_center
    if isinstance(domain, Annulus):
        mid = 0.5 * (domain.r_in + domain.r_out)
        anchor = domain.center.copy()
        anchor[0] += mid
        return anchor
    if isinstance(domain, PuncturedBall):
        # midpoint of the largest gap along the x0 axis, away from the puncture
        lo = domain.center.copy()
        lo[0] -= domain.radius
        hi = domain.center.copy()
        hi[0] += domain.radius
        for candidate in (0.5 * (domain.puncture + hi), 0.5 * (lo + domain.puncture)):
            if domain.contains(candidate):
                return candidate
        raise ValueError("no interior anchor found")
    raise TypeError(f"unknown domain type {type(domain)!r}")


def default_boundary_probes(domain: Domain) -> list[np.ndarray]:
    """Representative boundary points for diagnostics (axis points, corners, punctures)."""
    if isinstance(domain, Ball) or isinstance(domain, PuncturedBall):
        pts = []
        for j in range(domain.dim):
            for sign in (1.0, -1.0):
                p = domain.center.copy()
                p[j] += sign * domain.radius
                pts.append(p)
        if isinstance(domain, PuncturedBall):
            pts.append(domain.puncture.copy())
        return pts
    if isinstance(domain, AxisBox):
        corners = [np.array(c, dtype=float) for c in itertools.product(*zip(domain.lo, domain.hi))]
        centers = []
        mid = 0.5 * (domain.lo + domain.hi)
        for j in range(domain.dim):
            for val in (domain.lo[j], domain.hi[j]):
                p = mid.copy()
                p[j] = val
                centers.append(p)
        return corners + centers
    if isinstance(domain, HalfspacePolytope):
        pts = [v.copy() for v in domain.vertices]
        for a, b in zip(domain.normals, domain.offsets):
            # foot of the Chebyshev center on each face, kept only if on the boundary
            foot = domain.chebyshev_center + (b - a @ domain.chebyshev_center) * a
            if domain.boundary_distance(foot) <= BOUNDARY_TOL:
                pts.append(foot)
        return pts
    if isinstance(domain, Annulus):
        pts = []
        for radius in (domain.r_in, domain.r_out):
            for j in range(domain.dim):
                for sign in (1.0, -1.0):
                    p = domain.center.copy()
                    p[j] += sign * radius
                    pts.append(p)
        return pts
    raise TypeError(f"unknown domain type {type(domain)!r}")
