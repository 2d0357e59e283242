"""Detection, certification and application of flips.

A circuit X supports a flip of T when every tree obtained from X by
deleting one plus edge is a face of T and all of those faces share one
link; the flip replaces the plus-side faces by the minus-side ones inside
that link.  When the faces are present but the links disagree, some tree
of T contains the minus part and misses at least two elements of X; such
a tree is returned as the obstruction witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from typing import Optional, Union

from .core import Circuit, Dims, Simplex, circuit_of_cycle
from .triangulation import Triangulation


class StaleCertificate(RuntimeError):
    """Certificate no longer matches the triangulation it is applied to."""


class NotMaximal(LookupError):
    """Simplex is not a maximal simplex of the triangulation."""


@dataclass(frozen=True)
class FlipCertificate:
    circuit: Circuit
    link: tuple[Simplex, ...]
    removed: tuple[Simplex, ...]
    added: tuple[Simplex, ...]


@dataclass(frozen=True)
class Obstruction:
    witness: Simplex
    deficiency: int


def circuit_triangulations(X: Circuit) -> tuple[tuple[Simplex, ...], tuple[Simplex, ...]]:
    """Maximal simplices of the two triangulations of the circuit itself.

    The plus side consists of X minus one plus edge each; dually for minus.
    """
    full = X.minus_mask | X.plus_mask
    n = X.dims.n
    plus_side = tuple(
        sorted(Simplex(X.dims, full & ~(1 << (i * n + j))) for i, j in X.plus)
    )
    minus_side = tuple(
        sorted(Simplex(X.dims, full & ~(1 << (i * n + j))) for i, j in X.minus)
    )
    return plus_side, minus_side


def supports_flip(
    tri: Triangulation, X: Circuit
) -> Union[FlipCertificate, Obstruction, None]:
    """Certificate if X flips tri, an Obstruction if only the links fail,
    None when the plus-side faces are not all present."""
    plus_side, minus_side = circuit_triangulations(X)
    links = []
    for sigma in plus_side:
        hosts = [t for t in tri.maximal if sigma.issubset(t)]
        if not hosts:
            return None
        links.append(frozenset(t.difference(sigma) for t in hosts))
    if all(lk == links[0] for lk in links[1:]):
        link = tuple(sorted(links[0]))
        removed = tuple(
            sorted(rho.union(s) for rho in link for s in plus_side)
        )
        added = tuple(
            sorted(rho.union(s) for rho in link for s in minus_side)
        )
        return FlipCertificate(circuit=X, link=link, removed=removed, added=added)
    # links differ: produce the witness promised for the minus-side star
    xminus = Simplex(X.dims, X.minus_mask)
    size = len(X)
    best = None
    for t in tri.maximal:
        if xminus.issubset(t):
            inter = bin(t.mask & (X.minus_mask | X.plus_mask)).count("1")
            if inter <= size - 2 and (best is None or t < best[0]):
                best = (t, size - inter)
    if best is None:
        raise ValueError("links differ but no obstruction witness: invalid input")
    return Obstruction(witness=best[0], deficiency=best[1])


def apply_flip(tri: Triangulation, cert: FlipCertificate) -> Triangulation:
    current = set(tri.maximal)
    removed = set(cert.removed)
    if not removed.issubset(current):
        raise StaleCertificate("certificate's removed simplices are not all present")
    return Triangulation(tri.dims, (current - removed) | set(cert.added))


@lru_cache(maxsize=None)
def all_circuits(dims: Dims) -> tuple[Circuit, ...]:
    """Every signed simple cycle of the bipartite graph, both orientations."""
    m, n = Dims(*dims).check()
    seen: set[int] = set()
    out: list[Circuit] = []
    for k in range(2, min(m, n) + 1):
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                for rperm in permutations(rows[1:]):
                    rseq = (rows[0],) + rperm
                    for cseq in permutations(cols):
                        mask = 0
                        for r in range(k):
                            mask |= 1 << (rseq[r] * n + cseq[r])
                            mask |= 1 << (rseq[(r + 1) % k] * n + cseq[r])
                        if mask in seen:
                            continue
                        seen.add(mask)
                        edges = [(rseq[r], cseq[r]) for r in range(k)] + [
                            (rseq[(r + 1) % k], cseq[r]) for r in range(k)
                        ]
                        X = circuit_of_cycle(dims, edges)
                        out.append(X)
                        out.append(X.reverse())
    out.sort()
    return tuple(out)


def enumerate_flips(tri: Triangulation) -> tuple[FlipCertificate, ...]:
    """All supported flips, deduplicated and in canonical circuit order."""
    certs = []
    for X in all_circuits(tri.dims):
        res = supports_flip(tri, X)
        if isinstance(res, FlipCertificate):
            certs.append(res)
    certs.sort(key=lambda c: (c.circuit.minus_mask, c.circuit.plus_mask))
    return tuple(certs)


def psi(tri: Triangulation, cert: FlipCertificate, tau: Simplex) -> Simplex:
    """Carry a maximal simplex across the flip.

    Trees that miss part of the minus side are untouched; a tree containing
    the minus side misses exactly one plus edge, and its minus edge in that
    column is swapped for the missing plus edge.
    """
    if tau not in tri.maximal:
        raise NotMaximal(f"{tau!r} is not maximal in the triangulation")
    X = cert.circuit
    if X.minus_mask & ~tau.mask:
        return tau
    missing = X.plus_mask & ~tau.mask
    if bin(missing).count("1") != 1:
        raise ValueError("flip certificate inconsistent with triangulation")
    p = missing.bit_length() - 1
    ip, jr = divmod(p, X.dims.n)
    (ir,) = (i for i, j in X.minus if j == jr)
    return tau.without_edge(ir, jr).with_edge(ip, jr)


def order_effect(
    tri: Triangulation, cert: FlipCertificate, i: int, i2: int
) -> Optional[tuple[int, int]]:
    """Predicted change of the two-row column order caused by the flip.

    None means the order on rows (i, i2) is unchanged; otherwise the
    returned columns (j1, j2) are consecutive and swap places.  Only a
    square circuit on exactly the rows {i, i2} moves the order.
    """
    if i == i2:
        raise ValueError("rows must be distinct")
    X = cert.circuit
    if X.size != 2 or X.rows() != frozenset((i, i2)):
        return None
    _, (j1, j2) = X.cycle_sequence()
    return (j1, j2)
