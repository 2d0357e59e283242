"""Walkthrough: the exhaustive oracle and the flip graph.

Everything the fast combinatorial layer claims is double-checked here at
desk scale: exhaustive enumeration of all triangulations, an exact
rational-arithmetic validity test with no floats anywhere, and the flip
graph with its connectivity verdict.
"""

import random
from math import comb

from prodtri import (
    Dims,
    Triangulation,
    build_flip_graph,
    enumerate_triangulations,
    geometric_validate,
    is_connected,
    spanning_trees,
    validate,
)

for m, n in [(2, 2), (2, 3), (3, 3), (4, 2), (4, 3)]:
    corpus = enumerate_triangulations(Dims(m, n))
    print(f"{m}x{n}: {len(corpus)} triangulations, each with "
          f"{comb(m + n - 2, m - 1)} trees")

# The flip graph of the 3x3 product: 108 triangulations, one component.
corpus = enumerate_triangulations(Dims(3, 3))
graph = build_flip_graph(corpus)
degrees = sorted(graph.degree(p) for p in range(len(corpus)))
print(f"\n3x3 flip graph: {len(graph.edges)} edges, connected={is_connected(graph)}")
print(f"degrees: min {degrees[0]}, max {degrees[-1]}")

# The geometric validator agrees with the combinatorial one on random tree
# collections: that agreement is the point of having two of them.
rng = random.Random(0)
d = Dims(3, 3)
trees = spanning_trees(d)
agreements = 0
for _ in range(500):
    pick = rng.sample(trees, rng.choice([2, 3, 6]))
    T = Triangulation(d, pick)
    assert validate(T).ok == geometric_validate(T)
    agreements += 1
print(f"\ncombinatorial == geometric on {agreements} random collections")
