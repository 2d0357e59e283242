"""Fine mixed subdivisions of the dilated simplex.

A simplex whose columns all have nonempty neighborhoods corresponds to the
Minkowski sum of its column neighborhoods, a cell of the dilated simplex
n * conv(rows).  Over a whole triangulation these cells tile the dilated
simplex; cells whose single summand is the full row set are the unmixed
ones and carry a column label, one per column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from math import sqrt
from typing import Optional

from .core import Simplex, col_neighbors
from .triangulation import Triangulation


@dataclass(frozen=True)
class MixedCell:
    """One Minkowski-sum cell: a summand per column, plus integer vertices."""

    summands: tuple[tuple[int, ...], ...]
    shape: tuple[tuple[int, ...], ...]
    label: Optional[int]
    vertices: tuple[tuple[int, ...], ...]


def star_members(tri: Triangulation) -> tuple[Simplex, ...]:
    """All faces of the triangulation with every column neighborhood nonempty."""
    n = tri.dims.n
    seen: set[int] = set()
    out = []
    for t in tri.maximal:
        edges = t.edges
        for bits in range(1 << len(edges)):
            mask = 0
            for p in range(len(edges)):
                if bits >> p & 1:
                    i, j = edges[p]
                    mask |= 1 << (i * n + j)
            if mask in seen:
                continue
            seen.add(mask)
            sub = Simplex(tri.dims, mask)
            if all(col_neighbors(sub, j) for j in range(n)):
                out.append(sub)
    return tuple(sorted(out))


def mixed_cell(sigma: Simplex) -> MixedCell:
    m, n = sigma.dims
    summands = tuple(tuple(sorted(col_neighbors(sigma, j))) for j in range(n))
    if any(not s for s in summands):
        raise ValueError("every column needs a nonempty neighborhood")
    blocks = tuple(sorted(s for s in set(summands) if len(s) > 1))
    full = tuple(range(m))
    label = None
    if blocks == (full,):
        label = next(j for j, s in enumerate(summands) if s == full)
    verts = set()
    for choice in product(*summands):
        v = [0] * m
        for i in choice:
            v[i] += 1
        verts.add(tuple(v))
    return MixedCell(
        summands=summands,
        shape=blocks,
        label=label,
        vertices=tuple(sorted(verts)),
    )


def export_mixed(tri: Triangulation) -> dict:
    """Document of all cells, with 1-based rows/columns for the outside world."""
    cells = []
    for sigma in star_members(tri):
        cell = mixed_cell(sigma)
        cells.append(
            {
                "simplex": [[i + 1, j + 1] for i, j in sigma.edges],
                "summands": [[i + 1 for i in s] for s in cell.summands],
                "shape": [[i + 1 for i in b] for b in cell.shape],
                "label": None if cell.label is None else cell.label + 1,
                "vertices": [list(v) for v in cell.vertices],
                "maximal": len(sigma) == tri.dims.m + tri.dims.n - 1,
            }
        )
    return {"m": tri.dims.m, "n": tri.dims.n, "cells": cells}


def _planar(v: tuple[int, ...]) -> tuple[float, float]:
    # barycentric-ish projection of (x1,x2,x3) with fixed sum onto the plane
    return (v[1] + 0.5 * v[2], v[2] * sqrt(3) / 2) if len(v) == 3 else (float(v[-1]), 0.0)


def render_svg(tri: Triangulation) -> str:
    """Diagnostic picture of the subdivision for up to three rows."""
    m, n = tri.dims
    if m > 3:
        raise ValueError("rendering is only supported for m <= 3")
    scale = 140.0
    pad = 30.0
    height = n * sqrt(3) / 2 * scale if m == 3 else scale
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{n * scale + 2 * pad:.0f}" height="{height + 2 * pad:.0f}">'
    ]

    def to_xy(v):
        x, y = _planar(v)
        return (pad + x * scale, pad + height - y * scale)

    for t in tri.maximal:
        cell = mixed_cell(t)
        pts = [to_xy(v) for v in cell.vertices]
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        pts.sort(key=lambda p: math.atan2(p[1] - cy, p[0] - cx))
        path = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
        lines.append(
            f'<polygon points="{path}" fill="#dce9f7" stroke="#333" stroke-width="1"/>'
        )
        if cell.label is not None:
            lines.append(
                f'<text x="{cx:.1f}" y="{cy:.1f}" font-size="14" '
                f'text-anchor="middle">f{cell.label + 1}</text>'
            )
    lines.append("</svg>")
    return "\n".join(lines)
