import random
from math import factorial

import pytest

from prodtri.core import Dims, Simplex
from prodtri.flips import enumerate_flips
from prodtri.geometry import det_bareiss, feasible_eq_nonneg, simplex_volume
from prodtri.oracle import (
    BudgetExceeded,
    build_flip_graph,
    enumerate_triangulations,
    geometric_validate,
    is_connected,
    spanning_trees,
)
from prodtri.phases import staircase
from prodtri.triangulation import Triangulation, validate


@pytest.mark.parametrize(
    "m,n,count",
    [(2, 2, 2), (2, 3, 6), (3, 2, 6), (2, 4, 24), (4, 2, 24), (3, 3, 108)],
)
def test_enumeration_counts(m, n, count):
    corpus = enumerate_triangulations(Dims(m, n))
    assert len(corpus) == count
    assert len(set(corpus.digests())) == count


def test_spanning_tree_counts():
    # m^(n-1) * n^(m-1) spanning trees of the complete bipartite graph
    assert len(spanning_trees(Dims(2, 2))) == 4
    assert len(spanning_trees(Dims(4, 3))) == 4**2 * 3**3
    assert len(spanning_trees(Dims(3, 3))) == 81


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        enumerate_triangulations(Dims(4, 4))
    with pytest.raises(BudgetExceeded):
        geometric_validate(staircase(3), budget=5)


def test_every_corpus_member_is_valid(corpus33):
    for T in corpus33.triangulations:
        assert validate(T).ok


def test_det_and_volume():
    assert det_bareiss([[2, 0], [0, 3]]) == 6
    assert det_bareiss([[0, 1], [1, 0]]) == -1
    assert det_bareiss([[1, 2], [2, 4]]) == 0
    d = Dims(2, 2)
    tree = Simplex.from_edges(d, [(0, 0), (1, 0), (1, 1)])
    assert simplex_volume(tree) == 1
    degenerate = Simplex.from_edges(d, [(0, 0), (1, 1)])
    assert simplex_volume(degenerate) == 0


def test_geometric_validate_square(square):
    assert geometric_validate(square)
    d = square.dims
    diags = Triangulation(
        d,
        [
            Simplex.from_edges(d, [(0, 0), (1, 1)]),
            Simplex.from_edges(d, [(1, 0), (0, 1)]),
        ],
    )
    assert not geometric_validate(diags)


def test_geometric_agreement_randomized(corpus33):
    rng = random.Random(99)
    d = Dims(3, 3)
    trees = spanning_trees(d)
    for _ in range(400):
        k = rng.choice([2, 3, 6])
        pick = rng.sample(range(len(trees)), k)
        T = Triangulation(d, [trees[p] for p in pick])
        assert validate(T).ok == geometric_validate(T)


def test_flip_graph_square(corpus22):
    g = build_flip_graph(corpus22)
    assert len(g.edges) == 1
    assert is_connected(g)
    assert g.degree(0) == 1


def test_flip_graph_segment_products():
    # a segment times a simplex: triangulations are column orders and flips
    # are adjacent transpositions
    for n in (3, 4):
        corpus = enumerate_triangulations(Dims(2, n))
        g = build_flip_graph(corpus)
        assert len(corpus) == factorial(n)
        assert len(g.edges) == factorial(n) * (n - 1) // 2
        assert is_connected(g)


def test_flip_graph_degree_matches_enumeration(corpus33):
    g = build_flip_graph(corpus33)
    for p, T in enumerate(corpus33.triangulations):
        assert g.degree(p) == len(enumerate_flips(T))


def test_connect_walks_along_flip_graph_edges(corpus42):
    # every flip a connect run applies is an edge of the exhaustive graph
    from prodtri.flips import FlipCertificate, apply_flip, supports_flip
    from prodtri.phases import connect

    graph = build_flip_graph(corpus42)
    position = {t.digest(): p for p, t in enumerate(corpus42.triangulations)}
    for T in corpus42.triangulations[:8]:
        seq = connect(T)
        cur = T
        for step in seq.steps:
            cert = supports_flip(cur, step.circuit)
            assert isinstance(cert, FlipCertificate)
            after = apply_flip(cur, cert)
            edge = frozenset((position[cur.digest()], position[after.digest()]))
            assert edge in graph.edges
            cur = after


def test_simplex_feasibility_edge_cases():
    from fractions import Fraction as F

    assert feasible_eq_nonneg([], [])
    assert feasible_eq_nonneg([[F(2), F(-1)]], [F(0)])
    assert not feasible_eq_nonneg([[F(1), F(1)], [F(-1), F(-1)]], [F(1), F(1)])
