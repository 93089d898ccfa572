"""Exact treewidth, bramble, and chip-firing gonality certificates.

The package computes and cross-checks three kinds of witnesses on small
grid-like graphs (grids, stacked prisms, toroidal grids): tree
decompositions for treewidth upper bounds, brambles with exact hitting-set
orders for lower bounds, and divisors for the gonality game.
"""

__version__ = "0.1.0"

from .brambles import (
    Bramble,
    Classification,
    OrderCertificate,
    classify_family,
    gen_grid_bramble,
    gen_prism_b1,
    gen_prism_b2,
    gen_torus_cde,
    gen_torus_fg,
    is_connected_set,
    min_hitting_set,
    read_bramble,
    sets_touch,
    verify_order_certificate,
    write_bramble,
)
from .certificates import Certificate
from .chipfiring import (
    Divisor,
    FiringScript,
    GonalityResult,
    apply_firing_script,
    divisors_equivalent,
    exact_gonality,
    gen_winning_divisor,
    is_winning_divisor,
    q_reduce,
    read_divisor,
    write_divisor,
)
from .graphs import (
    FamilyMeta,
    Graph,
    are_isomorphic,
    cartesian_product,
    line_vertices,
    make_elementary,
    make_family,
    minor_step,
    read_gr,
    row_collapse_minor,
    write_gr,
)
from .treewidth import (
    BoundsReport,
    CoveringBag,
    SolverLimits,
    TreeDecomposition,
    ValidationReport,
    WidthResult,
    covering_bag,
    decomposition_from_elimination_order,
    degeneracy,
    exact_treewidth,
    min_fill_order,
    read_td,
    treewidth_bounds_report,
    validate_tree_decomposition,
    write_td,
)

__all__ = [
    "BoundsReport",
    "Bramble",
    "Certificate",
    "Classification",
    "CoveringBag",
    "Divisor",
    "FamilyMeta",
    "FiringScript",
    "GonalityResult",
    "Graph",
    "OrderCertificate",
    "SolverLimits",
    "TreeDecomposition",
    "ValidationReport",
    "WidthResult",
    "apply_firing_script",
    "are_isomorphic",
    "cartesian_product",
    "classify_family",
    "covering_bag",
    "decomposition_from_elimination_order",
    "degeneracy",
    "divisors_equivalent",
    "exact_gonality",
    "exact_treewidth",
    "gen_grid_bramble",
    "gen_prism_b1",
    "gen_prism_b2",
    "gen_torus_cde",
    "gen_torus_fg",
    "gen_winning_divisor",
    "is_connected_set",
    "is_winning_divisor",
    "line_vertices",
    "make_elementary",
    "make_family",
    "min_fill_order",
    "min_hitting_set",
    "minor_step",
    "q_reduce",
    "read_bramble",
    "read_divisor",
    "read_gr",
    "read_td",
    "row_collapse_minor",
    "sets_touch",
    "treewidth_bounds_report",
    "validate_tree_decomposition",
    "verify_order_certificate",
    "write_bramble",
    "write_divisor",
    "write_gr",
    "write_td",
    "__version__",
]
