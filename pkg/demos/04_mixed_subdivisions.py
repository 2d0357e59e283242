"""Walkthrough: triangulations as fine mixed subdivisions.

Summing the column neighborhoods of a tree gives a Minkowski-sum cell in
the dilated simplex; over a triangulation those cells tile it.  Cells
whose only large summand is the full row set are the unmixed ones and
carry the column labels, one per column.  For up to three rows the tiling
is drawable.
"""

import os
import tempfile

from prodtri import (
    Dims,
    enumerate_triangulations,
    export_mixed,
    render_svg,
    staircase,
)

# The segment-times-triangle staircase: three unit segments in a row.
corpus = enumerate_triangulations(Dims(2, 3))
seg = corpus.triangulations[0]
doc = export_mixed(seg)
maximal_cells = [c for c in doc["cells"] if c["maximal"]]
print("segment product cells:")
for cell in maximal_cells:
    print(f"  label={cell['label']} vertices={cell['vertices']}")

# A triangle-times-triangle example: rhombi and labeled triangles tiling
# the third dilation of a triangle.
corpus33 = enumerate_triangulations(Dims(3, 3))
T = corpus33.triangulations[17]
doc = export_mixed(T)
unmixed = [c for c in doc["cells"] if c["label"] is not None]
print(f"\n3x3 member: {len(doc['cells'])} cells, "
      f"{len(unmixed)} unmixed with labels {sorted(c['label'] for c in unmixed)}")

out = os.path.join(tempfile.gettempdir(), "mixed_3x3.svg")
with open(out, "w") as fh:
    fh.write(render_svg(T))
print("wrote drawing to", out)

# For the tetrahedron product, cells are exported as coordinates only.
doc4 = export_mixed(staircase(3))
print(f"\n4x3 staircase: {len(doc4['cells'])} cells, "
      f"{sum(1 for c in doc4['cells'] if c['label'] is not None)} unmixed")
