"""Batch front-end: config-driven solve / diagnose / verify / bench runs.

The config is a single JSON object; unknown keys are rejected and every
constraint violation names the offending field.  Output is CSV (floats
rendered with 17 significant digits) or a plain-text report, and a run's
bytes depend only on the config and seed, never on the worker count.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 runtime
precondition failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .estimator import estimate_grid, estimate_point, check_coordinate_martingale, check_mean_value, check_r_independence
from .geometry import (
    Annulus,
    AxisBox,
    Ball,
    Domain,
    HalfspacePolytope,
    NotOnBoundaryError,
    OutsideDomainError,
    PuncturedBall,
    default_boundary_probes,
    interior_anchor,
)
from .oracle import (
    Constant,
    Coordinate,
    FourierCircle,
    HarmonicPoly2D,
    PiecewiseLabel,
    fd_solve,
    regularity_report,
    validate_pairing,
)
from .walk import WalkParams, run_walk_block

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3

SEED_ENV_VAR = "DIRICHLET_MC_SEED"

MODES = ("solve", "diagnose", "verify", "bench")

DOMAIN_TYPES = ("ball", "axis_box", "halfspace_polytope", "annulus", "punctured_ball")
BOUNDARY_TYPES = ("constant", "coordinate", "harmonic_poly", "fourier", "piecewise")


class ConfigError(ValueError):
    """Malformed or constraint-violating configuration; message names the field."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _require(obj: dict, path: str, required: dict, optional: dict | None = None) -> dict:
    """Strictly pull keys from a JSON object: missing/unknown keys are errors."""
    optional = optional or {}
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        allowed = sorted(set(required) | set(optional))
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}; allowed keys are {allowed}")
    out = {}
    for key in required:
        if key not in obj:
            raise ConfigError(f"{path}: missing required key '{key}'")
        out[key] = obj[key]
    for key, default in optional.items():
        out[key] = obj.get(key, default)
    return out


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if not np.isfinite(value):
        raise ConfigError(f"{path}: must be finite, got {value!r}")
    return float(value)


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _as_vector(value, path: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{path}: expected a non-empty array of numbers")
    return [_as_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def parse_domain(obj, path: str = "domain") -> Domain:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigError(f"{path}: expected an object with a 'type' key")
    kind = obj["type"]
    try:
        if kind == "ball":
            spec = _require(obj, path, {"type": None, "center": None, "radius": None})
            return Ball(_as_vector(spec["center"], f"{path}.center"), _as_number(spec["radius"], f"{path}.radius"))
        if kind == "axis_box":
            spec = _require(obj, path, {"type": None, "lo": None, "hi": None})
            return AxisBox(_as_vector(spec["lo"], f"{path}.lo"), _as_vector(spec["hi"], f"{path}.hi"))
        if kind == "halfspace_polytope":
            spec = _require(obj, path, {"type": None, "normals": None, "offsets": None})
            if not isinstance(spec["normals"], list):
                raise ConfigError(f"{path}.normals: expected an array of vectors")
            normals = [_as_vector(n, f"{path}.normals[{i}]") for i, n in enumerate(spec["normals"])]
            offsets = _as_vector(spec["offsets"], f"{path}.offsets")
            return HalfspacePolytope(normals, offsets)
        if kind == "annulus":
            spec = _require(obj, path, {"type": None, "center": None, "r_in": None, "r_out": None})
            return Annulus(
                _as_vector(spec["center"], f"{path}.center"),
                _as_number(spec["r_in"], f"{path}.r_in"),
                _as_number(spec["r_out"], f"{path}.r_out"),
            )
        if kind == "punctured_ball":
            spec = _require(obj, path, {"type": None, "center": None, "radius": None, "puncture": None})
            return PuncturedBall(
                _as_vector(spec["center"], f"{path}.center"),
                _as_number(spec["radius"], f"{path}.radius"),
                _as_vector(spec["puncture"], f"{path}.puncture"),
            )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.type: unknown domain type {kind!r}; supported types are {list(DOMAIN_TYPES)}")


def parse_boundary(obj, path: str = "boundary"):
    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigError(f"{path}: expected an object with a 'type' key")
    kind = obj["type"]
    try:
        if kind == "constant":
            spec = _require(obj, path, {"type": None, "value": None})
            return Constant(_as_number(spec["value"], f"{path}.value"))
        if kind == "coordinate":
            spec = _require(obj, path, {"type": None, "index": None})
            return Coordinate(_as_int(spec["index"], f"{path}.index"))
        if kind == "harmonic_poly":
            spec = _require(obj, path, {"type": None, "kind": None})
            return HarmonicPoly2D(spec["kind"])
        if kind == "fourier":
            spec = _require(obj, path, {"type": None}, {"a": [], "b": []})
            return FourierCircle(
                tuple(_as_number(v, f"{path}.a[{i}]") for i, v in enumerate(spec["a"])),
                tuple(_as_number(v, f"{path}.b[{i}]") for i, v in enumerate(spec["b"])),
            )
        if kind == "piecewise":
            spec = _require(obj, path, {"type": None, "values": None})
            if not isinstance(spec["values"], dict):
                raise ConfigError(f"{path}.values: expected an object mapping patch names to numbers")
            return PiecewiseLabel(
                {k: _as_number(v, f"{path}.values.{k}") for k, v in spec["values"].items()}
            )
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.type: unknown boundary type {kind!r}; supported types are {list(BOUNDARY_TYPES)}")


def parse_walk(obj, path: str = "walk") -> WalkParams:
    spec = _require(obj, path, {}, {"r": 0.5, "epsilon": "auto", "max_steps": 100_000})
    r = _as_number(spec["r"], f"{path}.r")
    if not (0.0 < r < 1.0):
        raise ConfigError(f"{path}.r: must lie in the open interval (0, 1), got {r}")
    eps = spec["epsilon"]
    if eps == "auto":
        eps = None
    else:
        eps = _as_number(eps, f"{path}.epsilon")
        if not eps > 0:
            raise ConfigError(f"{path}.epsilon: must be > 0 or \"auto\", got {eps}")
    max_steps = _as_int(spec["max_steps"], f"{path}.max_steps")
    if max_steps < 1:
        raise ConfigError(f"{path}.max_steps: must be >= 1, got {max_steps}")
    return WalkParams(r=r, epsilon=eps, max_steps=max_steps)


@dataclass
class BenchSpec:
    r_values: tuple = (0.3, 0.5, 0.7, 0.9)
    epsilon_values: tuple | None = None  # None: scaled from the diameter at run time
    n_walks: int = 2000


@dataclass
class Config:
    domain: Domain
    boundary: object
    walk: WalkParams
    n_samples: int
    seed: int
    mode: str | None = None
    points: list | None = None
    grid_axes: list | None = None
    output: str | None = None
    workers: int = 1
    bench: BenchSpec = field(default_factory=BenchSpec)


def parse_config(text) -> Config:
    """Strictly parse a JSON config (bytes or str) into a Config."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    spec = _require(
        obj,
        "config",
        {"domain": None, "boundary": None},
        {
            "mode": None,
            "walk": {},
            "sampling": {},
            "points": None,
            "grid": None,
            "output": None,
            "workers": 1,
            "bench": {},
        },
    )
    domain = parse_domain(spec["domain"])
    boundary = parse_boundary(spec["boundary"])
    try:
        validate_pairing(boundary, domain)
    except ValueError as exc:
        raise ConfigError(f"boundary: {exc}") from exc
    walk = parse_walk(spec["walk"] if spec["walk"] is not None else {})

    sampling = _require(spec["sampling"], "sampling", {}, {"n_samples": 10_000, "seed": None})
    n_samples = _as_int(sampling["n_samples"], "sampling.n_samples")
    if n_samples < 1:
        raise ConfigError(f"sampling.n_samples: must be >= 1, got {n_samples}")
    seed = sampling["seed"]
    if seed is not None:
        seed = _as_int(seed, "sampling.seed")

    mode = spec["mode"]
    if mode is not None and mode not in MODES:
        raise ConfigError(f"mode: unknown mode {mode!r}; supported modes are {list(MODES)}")

    points = None
    if spec["points"] is not None:
        if not isinstance(spec["points"], list) or not spec["points"]:
            raise ConfigError("points: expected a non-empty array of points")
        points = []
        for i, p in enumerate(spec["points"]):
            coords = _as_vector(p, f"points[{i}]")
            if len(coords) != domain.dim:
                raise ConfigError(f"points[{i}]: has dimension {len(coords)}, domain has dimension {domain.dim}")
            points.append(np.array(coords))

    grid_axes = None
    if spec["grid"] is not None:
        g = _require(spec["grid"], "grid", {"axes": None})
        if not isinstance(g["axes"], list) or len(g["axes"]) != domain.dim:
            raise ConfigError(f"grid.axes: expected {domain.dim} axis specs for this domain")
        grid_axes = []
        for i, ax in enumerate(g["axes"]):
            a = _require(ax, f"grid.axes[{i}]", {"min": None, "max": None, "count": None})
            lo = _as_number(a["min"], f"grid.axes[{i}].min")
            hi = _as_number(a["max"], f"grid.axes[{i}].max")
            count = _as_int(a["count"], f"grid.axes[{i}].count")
            if count < 1:
                raise ConfigError(f"grid.axes[{i}].count: must be >= 1, got {count}")
            if hi < lo:
                raise ConfigError(f"grid.axes[{i}]: max must be >= min")
            grid_axes.append((lo, hi, count))

    output = spec["output"]
    if output is not None and not isinstance(output, str):
        raise ConfigError("output: expected a path string")
    workers = _as_int(spec["workers"], "workers")
    if workers < 1:
        raise ConfigError(f"workers: must be >= 1, got {workers}")

    bench_spec = _require(spec["bench"], "bench", {}, {"r_values": None, "epsilon_values": None, "n_walks": 2000})
    bench = BenchSpec()
    if bench_spec["r_values"] is not None:
        rs = tuple(_as_number(r, f"bench.r_values[{i}]") for i, r in enumerate(bench_spec["r_values"]))
        for r in rs:
            if not (0.0 < r < 1.0):
                raise ConfigError(f"bench.r_values: each r must lie in (0, 1), got {r}")
        bench.r_values = rs
    if bench_spec["epsilon_values"] is not None:
        eps = tuple(_as_number(e, f"bench.epsilon_values[{i}]") for i, e in enumerate(bench_spec["epsilon_values"]))
        for e in eps:
            if not e > 0:
                raise ConfigError(f"bench.epsilon_values: each epsilon must be > 0, got {e}")
        bench.epsilon_values = eps
    bench.n_walks = _as_int(bench_spec["n_walks"], "bench.n_walks")
    if bench.n_walks < 1:
        raise ConfigError(f"bench.n_walks: must be >= 1, got {bench.n_walks}")

    return Config(domain, boundary, walk, n_samples, seed, mode, points, grid_axes, output, workers, bench)


def _grid_points(config: Config) -> list[np.ndarray]:
    if config.points is not None:
        return config.points
    if config.grid_axes is not None:
        axes = [np.linspace(lo, hi, count) for lo, hi, count in config.grid_axes]
        mesh = np.meshgrid(*axes, indexing="ij")
        return [np.array(p) for p in zip(*(m.ravel() for m in mesh))]
    raise ConfigError("solve mode needs 'points' or 'grid' in the config")


# ---------------------------------------------------------------------------
# Modes


def run_solve(config: Config) -> str:
    points = _grid_points(config)
    entries = estimate_grid(
        config.domain,
        config.boundary,
        points,
        config.walk,
        config.n_samples,
        config.seed,
        workers=config.workers,
    )
    d = config.domain.dim
    header = [f"x{j}" for j in range(d)] + [
        "value",
        "stderr",
        "n_samples",
        "mean_steps",
        "truncation_fraction",
        "status",
    ]
    lines = [",".join(header)]
    for e in entries:
        coords = [_fmt(c) for c in e.point]
        if e.status == "ok":
            est = e.estimate
            row = coords + [
                _fmt(est.mean),
                _fmt(est.stderr),
                str(est.n_samples),
                _fmt(est.mean_steps),
                _fmt(est.truncation_fraction),
                "ok",
            ]
        elif e.status == "boundary":
            row = coords + [_fmt(e.value), _fmt(0.0), "0", _fmt(0.0), _fmt(0.0), "boundary"]
        else:
            row = coords + ["", "", "0", "", "", "outside"]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def run_diagnose(config: Config) -> str:
    points = config.points if config.points is not None else default_boundary_probes(config.domain)
    entries = regularity_report(config.domain, points, seed=config.seed or 0)
    d = config.domain.dim
    header = [f"x{j}" for j in range(d)] + ["status"]
    lines = [",".join(header)]
    for e in entries:
        lines.append(",".join([_fmt(c) for c in e.point] + [e.status]))
    return "\n".join(lines) + "\n"


def run_verify(config: Config) -> tuple[str, bool]:
    """Fixed verification battery; returns (report text, all passed)."""
    n = config.n_samples
    seed = config.seed
    params = config.walk
    lines = []
    checks = []

    ball = Ball([0.0, 0.0], 1.0)
    checks.append(
        check_r_independence(ball, Coordinate(0), [0.3, 0.2], (0.3, 0.5, 0.9), params, n, seed, workers=config.workers)
    )
    checks.append(
        check_mean_value(
            ball, FourierCircle(a=(0.0, 0.0, 1.0)), [0.2, 0.1], 0.3, 16, params, n, seed, workers=config.workers
        )
    )
    checks.append(check_coordinate_martingale(ball, [0.3, 0.0], params, n, 10, seed=seed))
    for report in checks:
        verdict = "PASS" if report.passed else "FAIL"
        lines.append(
            f"{report.quantity}: {verdict} (max discrepancy {report.max_discrepancy:.6g}"
            f" vs threshold {report.threshold:.6g})"
        )

    box = AxisBox([0.0, 0.0], [1.0, 1.0])
    data = HarmonicPoly2D("x2-y2")
    fd = fd_solve(box, data, 1.0 / 64)
    probes = [(0.25, 0.25), (0.5, 0.25), (0.5, 0.5), (0.25, 0.75), (0.75, 0.75)]
    worst = -np.inf
    fd_ok = True
    for k, probe in enumerate(probes):
        est = estimate_point(box, data, probe, params, n, seed, workers=config.workers, index_offset=k * n)
        gap = abs(est.mean - fd.value_at(probe))
        tol = 3.0 * est.stderr + 0.005 + 5e-4
        worst = max(worst, gap - tol)
        fd_ok = fd_ok and gap <= tol
    lines.append(f"finite-difference comparison: {'PASS' if fd_ok else 'FAIL'} (worst margin {worst:.6g})")

    all_ok = all(c.passed for c in checks) and fd_ok
    lines.append(f"VERIFY: {'PASS' if all_ok else 'FAIL'} ({sum(c.passed for c in checks) + fd_ok}/4 checks)")
    return "\n".join(lines) + "\n", all_ok


def run_bench(config: Config) -> str:
    domain = config.domain
    diam = domain.diameter()
    eps_values = config.bench.epsilon_values
    if eps_values is None:
        eps_values = tuple(scale * diam for scale in (1e-2, 1e-3, 1e-4))
    start = config.points[0] if config.points else interior_anchor(domain)
    n = config.bench.n_walks
    lines = ["r,epsilon,n_walks,mean_steps,median_steps,p95_steps,max_steps,truncated"]
    for r in config.bench.r_values:
        for eps in eps_values:
            params = WalkParams(r=r, epsilon=eps, max_steps=config.walk.max_steps)
            all_steps = []
            truncated = 0
            for s in range(0, n, 4096):
                count = min(4096, n - s)
                _, steps, trunc, _ = run_walk_block(start, domain, params, config.seed, s, count)
                all_steps.append(steps)
                truncated += int(trunc.sum())
            steps = np.concatenate(all_steps)
            lines.append(
                ",".join(
                    [
                        _fmt(r),
                        _fmt(eps),
                        str(n),
                        _fmt(steps.mean()),
                        _fmt(float(np.median(steps))),
                        _fmt(float(np.percentile(steps, 95))),
                        str(int(steps.max())),
                        str(truncated),
                    ]
                )
            )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirichlet-mc",
        description="Monte Carlo boundary-value solver: random walks from interior points "
        "estimate the harmonic extension of boundary data.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, helptext in (
        ("solve", "estimate the solution at configured points, emit CSV"),
        ("diagnose", "classify boundary points as certified regular or unknown"),
        ("verify", "run the internal consistency battery; exit 0 iff all checks pass"),
        ("bench", "step-count statistics over a (r, epsilon) grid, emit CSV"),
    ):
        p = sub.add_parser(mode, help=helptext)
        p.add_argument("config", help="path to the JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override the sampling seed")
        p.add_argument("--n", type=int, default=None, help="override the per-point sample count")
        p.add_argument("--r", type=float, default=None, help="override the contraction factor")
        p.add_argument("--out", default=None, help="override the output path (default: stdout)")
        p.add_argument("--workers", type=int, default=None, help="worker processes (never affects output bytes)")
    return parser


def load_config(args: argparse.Namespace) -> Config:
    try:
        with open(args.config, "rb") as fh:
            config = parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    # precedence: flag > config file > environment (seed only) > default
    if args.seed is not None:
        config.seed = args.seed
    if config.seed is None:
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            try:
                config.seed = int(env)
            except ValueError as exc:
                raise ConfigError(f"{SEED_ENV_VAR}: expected an integer, got {env!r}") from exc
        else:
            config.seed = 0
    if args.n is not None:
        if args.n < 1:
            raise ConfigError(f"--n: must be >= 1, got {args.n}")
        config.n_samples = args.n
    if args.r is not None:
        if not (0.0 < args.r < 1.0):
            raise ConfigError(f"--r: must lie in the open interval (0, 1), got {args.r}")
        config.walk = WalkParams(r=args.r, epsilon=config.walk.epsilon, max_steps=config.walk.max_steps)
    if args.out is not None:
        config.output = args.out
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError(f"--workers: must be >= 1, got {args.workers}")
        config.workers = args.workers
    return config


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        if args.mode == "solve":
            _emit(run_solve(config), config.output)
        elif args.mode == "diagnose":
            _emit(run_diagnose(config), config.output)
        elif args.mode == "bench":
            _emit(run_bench(config), config.output)
        else:
            report, ok = run_verify(config)
            _emit(report, config.output)
            if not ok:
                return EXIT_VERIFY_FAILED
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (OutsideDomainError, NotOnBoundaryError, ValueError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
