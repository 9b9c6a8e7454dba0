"""The contracting random walk and its finite-precision boundary termination.

From an interior point the walk repeatedly jumps a fraction r of its distance
to the boundary in a uniformly random direction:

    X(1) = v,   X(n+1) = X(n) + r * dist(X(n)) * theta_n,   0 < r < 1.

Each step stays strictly inside the domain, and the sequence converges to a
boundary point almost surely.  At finite precision the walk is stopped once
its boundary gap falls below ``epsilon`` and the last position is projected to
the nearest boundary point; a step cap guards against pathological runs and is
reported via ``truncated`` rather than raised.

Two equivalent execution paths are provided: a scalar reference walk
(`run_walk`) and a vectorized block runner (`run_walk_block`) that advances
thousands of walks per numpy operation.  Both consume each walk's own random
stream in the same order, so they produce bit-identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .geometry import Domain, OutsideDomainError, as_point
from .sampling import _MIN_NORM, RngStream, derive_stream, sample_unit_sphere

# Directions are pre-drawn per walk in chunks of this many steps.  The value
# only trades allocation against RNG call overhead; results do not depend on it.
_DIRECTION_CHUNK = 192


@dataclass(frozen=True)
class WalkParams:
    """Contraction factor, stopping shell, and step cap.

    ``epsilon=None`` means "auto": 1e-4 times the domain diameter, resolved
    when a walk runs.
    """

    r: float = 0.5
    epsilon: float | None = None
    max_steps: int = 100_000

    def __post_init__(self):
        if not (0.0 < self.r < 1.0):
            raise ValueError(f"contraction factor r must lie in (0, 1), got {self.r}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")

    def resolve_epsilon(self, domain: Domain) -> float:
        eps = 1e-4 * domain.diameter() if self.epsilon is None else self.epsilon
        if not eps < domain.diameter():
            raise ValueError(f"epsilon={eps} must be smaller than the domain diameter")
        return eps

    def with_r(self, r: float) -> "WalkParams":
        return replace(self, r=r)


@dataclass(frozen=True)
class WalkResult:
    """Terminal state of one walk: projected exit point and stopping diagnostics."""

    exit_point: np.ndarray
    steps: int
    truncated: bool
    final_gap: float


def deterministic_step(x, domain: Domain, r: float, direction) -> np.ndarray:
    """One walk step with an externally supplied unit direction."""
    p = as_point(x, domain.dim)
    if not (0.0 < r < 1.0):
        raise ValueError(f"contraction factor r must lie in (0, 1), got {r}")
    gap = domain.distance_to_boundary(p)
    return p + (r * gap) * np.asarray(direction, dtype=float)


def walk_step(x, domain: Domain, r: float, stream: RngStream) -> np.ndarray:
    """One random walk step; the result is strictly inside the domain."""
    return deterministic_step(x, domain, r, sample_unit_sphere(stream, domain.dim))


def run_walk(v, domain: Domain, params: WalkParams, stream: RngStream, record_path: bool = False):
    """Run one walk to the epsilon shell and project onto the boundary.

    Returns a WalkResult, or ``(WalkResult, path)`` with the list of all
    iterates when ``record_path`` is set.
    """
    x = as_point(v, domain.dim)
    if not domain.contains(x):
        raise OutsideDomainError(f"walk origin {x.tolist()} is not inside the domain")
    eps = params.resolve_epsilon(domain)
    d = domain.dim
    path = [x.copy()] if record_path else None
    steps = 0
    while True:
        gap = float(domain.interior_distance_many(x[None, :])[0])
        if gap <= eps:
            truncated = False
            break
        if steps >= params.max_steps:
            truncated = True
            break
        x = x + (params.r * gap) * sample_unit_sphere(stream, d)
        steps += 1
        if record_path:
            path.append(x.copy())
    result = WalkResult(domain.boundary_projection(x), steps, truncated, gap)
    return (result, path) if record_path else result


def _project_exits(domain: Domain, X: np.ndarray) -> np.ndarray:
    """Vectorized nearest-boundary projection for interior rows.

    Distance ties take the first candidate in face order; ties only arise on
    measure-zero sets that random walk endpoints do not hit.
    """
    from . import geometry as g

    if isinstance(domain, g.Ball):
        v = X - domain.center
        n = np.linalg.norm(v, axis=1)
        unit = np.zeros_like(X)
        unit[:, 0] = 1.0
        nz = n > 0
        unit[nz] = v[nz] / n[nz, None]
        return domain.center + domain.radius * unit
    if isinstance(domain, g.AxisBox):
        cands = np.empty((X.shape[0], 2 * domain.dim))
        cands[:, 0::2] = X - domain.lo
        cands[:, 1::2] = domain.hi - X
        idx = np.argmin(cands, axis=1)
        axis = idx // 2
        feet = X.copy()
        feet[np.arange(X.shape[0]), axis] = np.where(idx % 2 == 0, domain.lo[axis], domain.hi[axis])
        return feet
    if isinstance(domain, g.HalfspacePolytope):
        slack = domain._slacks_many(X)
        idx = np.argmin(slack, axis=1)
        rows = np.arange(X.shape[0])
        return X + slack[rows, idx][:, None] * domain.normals[idx]
    if isinstance(domain, g.Annulus):
        v = X - domain.center
        n = np.linalg.norm(v, axis=1)
        unit = np.zeros_like(X)
        unit[:, 0] = 1.0
        nz = n > 0
        unit[nz] = v[nz] / n[nz, None]
        radius = np.where(n - domain.r_in <= domain.r_out - n, domain.r_in, domain.r_out)
        return domain.center + radius[:, None] * unit
    if isinstance(domain, g.PuncturedBall):
        to_sphere = domain.radius - np.linalg.norm(X - domain.center, axis=1)
        to_punct = np.linalg.norm(X - domain.puncture, axis=1)
        v = X - domain.center
        n = np.linalg.norm(v, axis=1)
        unit = np.zeros_like(X)
        unit[:, 0] = 1.0
        nz = n > 0
        unit[nz] = v[nz] / n[nz, None]
        feet = domain.center + domain.radius * unit
        at_punct = to_punct < to_sphere
        feet[at_punct] = domain.puncture
        return feet
    raise TypeError(f"unknown domain type {type(domain)!r}")


class _DirectionBank:
    """Per-walk chunked direction buffers drawn lazily from per-walk streams."""

    def __init__(self, seed: int, start_index: int, count: int, dim: int):
        self.gens = [derive_stream(seed, start_index + i).generator for i in range(count)]
        self.dim = dim
        self.buffers = np.empty((count, _DIRECTION_CHUNK, dim))
        self.cursors = np.full(count, _DIRECTION_CHUNK, dtype=np.int64)

    def _refill(self, ids: np.ndarray):
        for i in ids:
            self.buffers[i] = self.gens[i].standard_normal((_DIRECTION_CHUNK, self.dim))
            self.cursors[i] = 0

    def draw_unit(self, ids: np.ndarray) -> np.ndarray:
        """Next unit direction for each listed walk, consuming its stream."""
        need = ids[self.cursors[ids] >= _DIRECTION_CHUNK]
        if need.size:
            self._refill(need)
        raw = self.buffers[ids, self.cursors[ids]].copy()
        norms = np.sqrt((raw * raw).sum(axis=1))
        while True:  # redraw guard, same stream consumption as the scalar sampler
            bad = norms < _MIN_NORM
            if not np.any(bad):
                break
            bad_ids = ids[bad]
            self.cursors[bad_ids] += 1
            need = bad_ids[self.cursors[bad_ids] >= _DIRECTION_CHUNK]
            if need.size:
                self._refill(need)
            raw[bad] = self.buffers[bad_ids, self.cursors[bad_ids]]
            norms[bad] = np.sqrt((raw[bad] * raw[bad]).sum(axis=1))
        self.cursors[ids] += 1
        return raw / norms[:, None]


def run_walk_block(v, domain: Domain, params: WalkParams, seed: int, start_index: int, count: int):
    """Run ``count`` independent walks (streams start_index..start_index+count-1).

    Returns arrays ``(exit_points, steps, truncated, final_gaps)``.  Walk i is
    bit-identical to ``run_walk(v, domain, params, derive_stream(seed,
    start_index + i))``.
    """
    x0 = as_point(v, domain.dim)
    if not domain.contains(x0):
        raise OutsideDomainError(f"walk origin {x0.tolist()} is not inside the domain")
    eps = params.resolve_epsilon(domain)
    d = domain.dim
    bank = _DirectionBank(seed, start_index, count, d)

    pos = np.tile(x0, (count, 1))
    steps = np.zeros(count, dtype=np.int64)
    gaps = np.empty(count)
    truncated = np.zeros(count, dtype=bool)
    active = np.arange(count)

    while active.size:
        dist = domain.interior_distance_many(pos[active])
        done = dist <= eps
        if np.any(done):
            ids = active[done]
            gaps[ids] = dist[done]
            active = active[~done]
            dist = dist[~done]
            if not active.size:
                break
        capped = steps[active] >= params.max_steps
        if np.any(capped):
            ids = active[capped]
            truncated[ids] = True
            gaps[ids] = dist[capped]
            active = active[~capped]
            dist = dist[~capped]
            if not active.size:
                break
        theta = bank.draw_unit(active)
        pos[active] += (params.r * dist)[:, None] * theta
        steps[active] += 1

    return _project_exits(domain, pos), steps, truncated, gaps


def positions_after(v, domain: Domain, r: float, n_steps: int, seed: int, start_index: int, count: int) -> np.ndarray:
    """Position of ``count`` independent unstopped walks after ``n_steps`` steps.

    With the walk indexed from X(1) = v, the array returned is X(n_steps + 1)
    for each walk.  Used for martingale diagnostics, which need the walk at a
    fixed index rather than at its boundary exit.
    """
    x0 = as_point(v, domain.dim)
    if not domain.contains(x0):
        raise OutsideDomainError(f"walk origin {x0.tolist()} is not inside the domain")
    if not (0.0 < r < 1.0):
        raise ValueError(f"contraction factor r must lie in (0, 1), got {r}")
    d = domain.dim
    bank = _DirectionBank(seed, start_index, count, d)
    pos = np.tile(x0, (count, 1))
    ids = np.arange(count)
    for _ in range(n_steps):
        dist = domain.interior_distance_many(pos)
        pos += (r * dist)[:, None] * bank.draw_unit(ids)
    return pos
