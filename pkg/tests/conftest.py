import numpy as np
import pytest

from momentmoduli.distributions import FiniteDist
from momentmoduli.spaces import (
    BipartiteGraph,
    CMatrix,
    CVector,
    GraphVertex,
    ParallelogramS1,
    RealLine,
    Schatten,
    Snowflake,
)


def random_point(space, rng, dim=4, weights=None):
    if isinstance(space, RealLine):
        return float(rng.normal())
    if isinstance(space, Snowflake):
        return random_point(space.base, rng, dim, weights)
    if isinstance(space, BipartiteGraph):
        side = "L" if rng.integers(2) else "R"
        return GraphVertex(side, int(rng.integers(space.n)))
    if isinstance(space, Schatten):
        m = dim
        return CMatrix(rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m)))
    if isinstance(space, ParallelogramS1):
        d = 2 * space.n
        return CVector(rng.normal(size=d) + 1j * rng.normal(size=d))
    return CVector(rng.normal(size=dim) + 1j * rng.normal(size=dim), weights)


def random_dist(space, rng, n_atoms, dim=4, weights=None):
    atoms = [random_point(space, rng, dim, weights) for _ in range(n_atoms)]
    return FiniteDist(space, tuple(atoms), rng.dirichlet(np.ones(n_atoms)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
