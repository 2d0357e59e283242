import pytest

from prodtri.core import Dims, Simplex
from prodtri.oracle import enumerate_triangulations, spanning_trees
from prodtri.triangulation import Triangulation


@pytest.fixture(scope="session")
def square():
    d = Dims(2, 2)
    lower = Simplex.from_edges(d, [(0, 0), (1, 0), (1, 1)])
    upper = Simplex.from_edges(d, [(0, 0), (0, 1), (1, 1)])
    return Triangulation(d, [lower, upper])


@pytest.fixture(scope="session")
def seg_staircase():
    """Staircase of the segment times a triangle, column order f1<f2<f3."""
    d = Dims(2, 3)
    return Triangulation(
        d,
        [
            Simplex.from_edges(d, [(0, 0), (0, 1), (0, 2), (1, 0)]),
            Simplex.from_edges(d, [(0, 1), (0, 2), (1, 0), (1, 1)]),
            Simplex.from_edges(d, [(0, 2), (1, 0), (1, 1), (1, 2)]),
        ],
    )


@pytest.fixture(scope="session")
def corpus22():
    return enumerate_triangulations(Dims(2, 2))


@pytest.fixture(scope="session")
def corpus23():
    return enumerate_triangulations(Dims(2, 3))


@pytest.fixture(scope="session")
def corpus33():
    return enumerate_triangulations(Dims(3, 3))


@pytest.fixture(scope="session")
def corpus42():
    return enumerate_triangulations(Dims(4, 2))


@pytest.fixture(scope="session")
def corpus43():
    return enumerate_triangulations(Dims(4, 3))


@pytest.fixture(scope="session")
def trees43():
    return spanning_trees(Dims(4, 3))
