"""Triangulations of a product of two simplices as spanning-tree sets,
with a flip engine, flip-connectivity drivers for the tetrahedron case,
and an exhaustive enumeration oracle for desk-scale verification."""

from .core import (
    Circuit,
    Dims,
    NotACycle,
    Simplex,
    alternating_path,
    circuit_of_cycle,
    col_neighbors,
    components,
    connecting_edges,
    is_forest,
    is_spanning_tree,
    neighborhood,
    noncrossing,
    row_neighbors,
    shape,
    tree_path,
)
from .triangulation import (
    ContractionMap,
    LocalTriangulation,
    NotInComplex,
    Triangulation,
    ValidityReport,
    contract,
    contraction_map,
    contains,
    link_maximal,
    proper,
    restrict,
    star,
    validate,
)
from .flips import (
    FlipCertificate,
    NotMaximal,
    Obstruction,
    StaleCertificate,
    all_circuits,
    apply_flip,
    circuit_triangulations,
    enumerate_flips,
    order_effect,
    psi,
    supports_flip,
)
from .orders import (
    EQUIVALENT,
    GREATER,
    LESS,
    AdjacencyMove,
    ColumnQuasiorder,
    EmptyInput,
    MalformedLocal,
    NoMinimal,
    PrecedenceDigraph,
    SegmentDecomposition,
    build_precedence,
    classify_adjacency,
    compare_columns,
    free_equivalent,
    restriction_order,
    segment_decompose,
    select_extremal,
    toward_row,
    toward_row_free,
    unique_minimal,
)
from .phases import (
    FlipSequence,
    FlipStep,
    GoodnessContext,
    ProofGap,
    WrongDims,
    apply_sequence,
    compute_TI,
    compute_TII,
    connect,
    goodness,
    phase_one,
    phase_three,
    phase_two,
    staircase,
)
from .oracle import (
    BudgetExceeded,
    Corpus,
    FlipGraph,
    build_flip_graph,
    enumerate_triangulations,
    geometric_validate,
    is_connected,
    spanning_trees,
)
from .mixed import MixedCell, export_mixed, mixed_cell, render_svg, star_members

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
