"""Triangulations of the product as canonical sets of spanning trees.

A collection of spanning trees is a triangulation exactly when the trees
pairwise intersect properly and there are C(m+n-2, m-1) of them: the product
polytope is totally unimodular, every tree simplex has unit normalized
volume, and the volumes add up to the binomial.  ``validate`` checks these
three combinatorial conditions; the geometric counterpart lives in
``prodtri.oracle``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from math import comb
from typing import Iterable

from .core import Dims, Simplex, components, is_spanning_tree

# proper-intersection results keyed by (n, mask_lo, mask_hi); tree pairs recur
# constantly across flip walks, so this cache does most of the work
_proper_cache: dict[tuple[int, int, int], bool] = {}


class NotInComplex(LookupError):
    """Simplex is not a face of the triangulation."""


def proper(s1: Simplex, s2: Simplex) -> bool:
    """No circuit has its plus part in s1 and its minus part in s2.

    Equivalently the convex hulls meet exactly in the hull of the shared
    vertices.  Orient s1's edges row-to-column and s2's column-to-row; an
    offending circuit is then a directed cycle through at least two rows.
    """
    if s1.dims != s2.dims:
        raise ValueError("dimension mismatch")
    a, b = s1.mask, s2.mask
    if a > b:
        a, b = b, a
    key = (s1.dims.n, a, b)
    hit = _proper_cache.get(key)
    if hit is None:
        hit = not _has_split_circuit(s1.dims, a, b)
        _proper_cache[key] = hit
    return hit


def _has_split_circuit(dims: Dims, mask1: int, mask2: int) -> bool:
    m, n = dims
    union = Simplex(dims, mask1 | mask2)
    if len(union) + len(components(union)) == m + n:
        return False  # union is a forest: no cycle at all
    nv = m + n
    out = [0] * nv
    for i, j in Simplex(dims, mask1):
        out[i] |= 1 << (m + j)
    for i, j in Simplex(dims, mask2):
        out[m + j] |= 1 << i
    row_mask_above = [((1 << m) - 1) & ~((1 << (s + 1)) - 1) for s in range(m)]

    def dfs(v: int, visited: int, depth: int, start: int) -> bool:
        targets = out[v]
        if depth >= 3 and targets >> start & 1:
            return True
        allowed = targets & ~visited
        if v >= m:  # leaving a column: only rows above the start row
            allowed &= row_mask_above[start] | (1 << start)
        allowed &= ~(1 << start)
        while allowed:
            low = allowed & -allowed
            w = low.bit_length() - 1
            if dfs(w, visited | low, depth + 1, start):
                return True
            allowed ^= low
        return False

    for s in range(m):
        if out[s] and dfs(s, 1 << s, 0, s):
            return True
    return False


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    violations: tuple[tuple[str, object], ...]

    def __bool__(self):
        return self.ok


class Triangulation:
    """Canonically ordered set of maximal simplices plus an edge index."""

    __slots__ = ("dims", "maximal", "index", "_digest")

    def __init__(self, dims: Dims, maximal: Iterable[Simplex]):
        dims = Dims(*dims).check()
        trees = sorted(set(maximal))
        if any(t.dims != dims for t in trees):
            raise ValueError("simplex dims disagree with triangulation dims")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "maximal", tuple(trees))
        index: dict[tuple[int, int], list[int]] = {}
        for pos, t in enumerate(trees):
            for e in t:
                index.setdefault(e, []).append(pos)
        object.__setattr__(
            self, "index", {e: tuple(ps) for e, ps in index.items()}
        )
        object.__setattr__(self, "_digest", None)

    def __setattr__(self, *a):
        raise AttributeError("Triangulation is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Triangulation)
            and self.dims == other.dims
            and self.maximal == other.maximal
        )

    def __hash__(self):
        return hash((self.dims, self.maximal))

    def __len__(self):
        return len(self.maximal)

    def digest(self) -> str:
        if self._digest is None:
            h = hashlib.sha256()
            h.update(repr((self.dims, tuple(t.mask for t in self.maximal))).encode())
            object.__setattr__(self, "_digest", h.hexdigest())
        return self._digest

    def contains(self, sigma: Simplex) -> bool:
        if sigma.mask == 0:
            return True
        edges = sigma.edges
        cands = self.index.get(edges[0])
        if not cands:
            return False
        return any(sigma.issubset(self.maximal[p]) for p in cands)

    def star(self, xi: Simplex) -> "LocalTriangulation":
        return star(self, xi)

    def __repr__(self):
        return f"Triangulation({self.dims.m}x{self.dims.n}, {len(self.maximal)} trees)"


class LocalTriangulation:
    """Simplices of a triangulation that all contain a fixed base simplex."""

    __slots__ = ("dims", "base", "maximal")

    def __init__(self, dims: Dims, base: Simplex, maximal: Iterable[Simplex]):
        dims = Dims(*dims).check()
        trees = sorted(set(maximal))
        if any(not base.issubset(t) for t in trees):
            raise ValueError("some maximal simplex does not contain the base")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "maximal", tuple(trees))

    def __setattr__(self, *a):
        raise AttributeError("LocalTriangulation is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, LocalTriangulation)
            and self.dims == other.dims
            and self.base == other.base
            and self.maximal == other.maximal
        )

    def __hash__(self):
        return hash((self.dims, self.base, self.maximal))

    def __len__(self):
        return len(self.maximal)

    def contains(self, sigma: Simplex) -> bool:
        return any(sigma.issubset(t) for t in self.maximal)

    def star(self, xi: Simplex) -> "LocalTriangulation":
        return star(self, xi)

    def __repr__(self):
        return (
            f"LocalTriangulation({self.dims.m}x{self.dims.n}, base={self.base!r},"
            f" {len(self.maximal)} maximal)"
        )


def contains(tri, sigma: Simplex) -> bool:
    return tri.contains(sigma)


def link_maximal(tri: Triangulation, sigma: Simplex) -> frozenset[Simplex]:
    """Maximal simplices of the link: tau minus sigma over all tau containing sigma."""
    if not tri.contains(sigma):
        raise NotInComplex(f"{sigma!r} not in triangulation")
    return frozenset(t.difference(sigma) for t in tri.maximal if sigma.issubset(t))


def star(tri, xi: Simplex):
    if not tri.contains(xi):
        raise NotInComplex(f"{xi!r} not in triangulation")
    base = xi if isinstance(tri, Triangulation) else tri.base.union(xi)
    return LocalTriangulation(
        tri.dims, base, [t for t in tri.maximal if xi.issubset(t)]
    )


def validate(tri: Triangulation) -> ValidityReport:
    """Spanning trees, pairwise proper, and the unimodular count."""
    violations: list[tuple[str, object]] = []
    for t in tri.maximal:
        if not is_spanning_tree(t):
            violations.append(("not_spanning", t))
    trees = tri.maximal
    for a in range(len(trees)):
        for b in range(a + 1, len(trees)):
            if not proper(trees[a], trees[b]):
                violations.append(("improper_pair", (trees[a], trees[b])))
    expected = comb(tri.dims.m + tri.dims.n - 2, tri.dims.m - 1)
    if len(trees) != expected:
        violations.append(("cardinality", (len(trees), expected)))
    return ValidityReport(not violations, tuple(violations))


def _maximal_members(masks: Iterable[int], dims: Dims) -> list[Simplex]:
    masks = sorted(set(masks), key=lambda x: (-bin(x).count("1"), x))
    keep: list[int] = []
    for x in masks:
        if not any(x & ~y == 0 for y in keep):
            keep.append(x)
    return [Simplex(dims, x) for x in keep]


def restrict(tri, rows: Iterable[int], cols: Iterable[int]):
    """Restriction to the face rows x cols, relabeled order-preservingly.

    Accepts a Triangulation or a LocalTriangulation (whose base must lie
    inside the face); returns the same kind on the smaller product.
    """
    rows = sorted(set(rows))
    cols = sorted(set(cols))
    dims = tri.dims
    sub = Dims(len(rows), len(cols)).check()
    rmap = {i: a for a, i in enumerate(rows)}
    cmap = {j: b for b, j in enumerate(cols)}

    def image(simplex: Simplex) -> Simplex:
        return Simplex.from_edges(
            sub,
            [(rmap[i], cmap[j]) for i, j in simplex if i in rmap and j in cmap],
        )

    cut = [image(t) for t in tri.maximal]
    top = _maximal_members([s.mask for s in cut], sub)
    if isinstance(tri, LocalTriangulation):
        base = tri.base
        if any(i not in rmap or j not in cmap for i, j in base):
            raise ValueError("local base does not lie inside the face")
        return LocalTriangulation(sub, image(base), top)
    return Triangulation(sub, top)


@dataclass(frozen=True)
class ContractionMap:
    """Combinatorial quotient by the connected components of a base forest."""

    dims: Dims
    image_dims: Dims
    row_blocks: tuple[frozenset[int], ...]
    col_blocks: tuple[frozenset[int], ...]
    anchors: tuple[tuple[int, int], ...]
    row_of: dict = field(compare=False, repr=False, default=None)
    col_of: dict = field(compare=False, repr=False, default=None)

    def apply(self, simplex: Simplex) -> Simplex:
        return Simplex.from_edges(
            self.image_dims, [(self.row_of[i], self.col_of[j]) for i, j in simplex]
        )


def contraction_map(xi: Simplex) -> ContractionMap:
    m, n = xi.dims
    comps = components(xi)
    row_blocks, col_blocks, anchors = [], [], []
    row_of, col_of = {}, {}
    edge_comps = []
    for comp in sorted(comps, key=min):
        rows = frozenset(v for v in comp if v < m)
        cols = frozenset(v - m for v in comp if v >= m)
        if rows:
            for i in rows:
                row_of[i] = len(row_blocks)
            row_blocks.append(rows)
        if cols:
            for j in cols:
                col_of[j] = len(col_blocks)
            col_blocks.append(cols)
        if rows and cols:
            edge_comps.append((row_blocks.index(rows), col_blocks.index(cols)))
    anchors = tuple(edge_comps)
    return ContractionMap(
        dims=xi.dims,
        image_dims=Dims(len(row_blocks), len(col_blocks)),
        row_blocks=tuple(row_blocks),
        col_blocks=tuple(col_blocks),
        anchors=anchors,
        row_of=row_of,
        col_of=col_of,
    )


def contract(tri, xi: Simplex):
    """Image of the star at xi under the component quotient.

    Returns (image local triangulation, bijection from the star's maximal
    simplices to theirs images).
    """
    if not tri.contains(xi):
        raise NotInComplex(f"{xi!r} not in triangulation")
    cmap = contraction_map(xi)
    anchor_base = Simplex.from_edges(cmap.image_dims, cmap.anchors)
    if isinstance(tri, LocalTriangulation):
        anchor_base = anchor_base.union(cmap.apply(tri.base))
    bijection: dict[Simplex, Simplex] = {}
    for t in tri.maximal:
        if xi.issubset(t):
            bijection[t] = cmap.apply(t)
    image = LocalTriangulation(cmap.image_dims, anchor_base, bijection.values())
    return image, bijection
