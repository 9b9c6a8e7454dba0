import numpy as np
import pytest

from dirichlet_mc import (
    Annulus,
    AxisBox,
    Ball,
    HalfspacePolytope,
    PuncturedBall,
)


def catalog():
    """One representative instance per domain variant (plus a 1-D interval)."""
    return {
        "ball2": Ball([0.0, 0.0], 1.0),
        "ball3": Ball([0.0, 0.0, 0.0], 1.0),
        "box2": AxisBox([0.0, 0.0], [1.0, 1.0]),
        "interval": AxisBox([0.0], [1.0]),
        "polytope": HalfspacePolytope(
            [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [1.0, 1.0]],
            [1.0, 1.0, 1.0, 1.0, 1.5],
        ),
        "annulus": Annulus([0.0, 0.0], 1.0, 2.0),
        "punctured": PuncturedBall([0.0, 0.0], 1.0, [0.3, 0.0]),
    }


@pytest.fixture(scope="session")
def domains():
    return catalog()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240831)
