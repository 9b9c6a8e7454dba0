"""Seedable random streams and exact uniform sampling on the unit sphere.

Streams are counter-based (Philox keyed by ``(root_seed, stream_index)``), so
stream i of a run is a pure function of the seed and the index.  Assigning one
stream per Monte Carlo sample makes every result independent of how samples
are scheduled across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

_MASK64 = (1 << 64) - 1
_MIN_NORM = 1e-100  # redraw guard; hit with probability ~0, keeps the map total


@dataclass(eq=False)
class RngStream:
    """One independent random stream, reconstructible from (root_seed, stream_index)."""

    root_seed: int
    stream_index: int
    generator: Generator = field(repr=False, default=None)

    def __post_init__(self):
        if self.generator is None:
            key = np.array([self.root_seed & _MASK64, self.stream_index & _MASK64], dtype=np.uint64)
            self.generator = Generator(Philox(key=key))

    def standard_normal(self, shape) -> np.ndarray:
        return self.generator.standard_normal(shape)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)


def derive_stream(root_seed: int, index: int) -> RngStream:
    """Deterministic, collision-free mapping from (seed, index) to a stream."""
    return RngStream(root_seed, index)


def sample_unit_sphere(stream: RngStream, d: int) -> np.ndarray:
    """Uniform draw from the unit sphere in R^d via normalized Gaussians.

    The Gaussian-normalization construction is dimension generic: the same
    code path covers d = 1 (the two-point sphere) through any d.
    """
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got d={d}")
    while True:
        g = stream.standard_normal(d)
        # (g*g).sum() rather than g@g: keeps rounding identical to the batched
        # walk runner, which normalizes many draws at once
        norm = float(np.sqrt((g * g).sum()))
        if norm >= _MIN_NORM:
            return g / norm


def sample_unit_sphere_many(stream: RngStream, d: int, n: int) -> np.ndarray:
    """n independent uniform sphere points from one stream, rows of shape (n, d)."""
    if d < 1:
        raise ValueError(f"sphere dimension must be >= 1, got d={d}")
    out = np.empty((n, d))
    filled = 0
    while filled < n:
        g = stream.standard_normal((n - filled, d))
        norms = np.sqrt((g * g).sum(axis=1))
        ok = norms >= _MIN_NORM
        k = int(ok.sum())
        out[filled : filled + k] = g[ok] / norms[ok, None]
        filled += k
    return out
