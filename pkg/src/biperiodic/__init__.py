"""Doubly periodic alternating links: torsion growth, Mahler measures and volumes."""

from .charpoly import canonicalize, dimer_char_poly, kasteleyn_matrix, kasteleyn_signs, laplacian_poly
from .exact import (
    ElementaryDivisors,
    brute_force_tree_count,
    fourier_tree_count,
    smith_normal_form,
    torsion_order,
    tree_count,
)
from .experiments import (
    TilingCensus,
    census,
    cover_volume,
    link_volume,
    ratio_limit,
    torsion_growth_series,
    tree_entropy,
    verify_report,
)
from .laurent import LaurentMatrix, LaurentPoly2, det, format_poly, parse_poly
from .mahler import MahlerResult, lobachevsky, mahler_1var, mahler_2var, mahler_2var_grid, volume_constants
from .mapfile import export_map, load_map
from .periodic_graph import (
    BUILTIN_NAMES,
    FiniteGraph,
    TorusGraph,
    TorusMap,
    build_builtin,
    checkerboard,
    dual_graph,
    faces,
    overlaid_graph,
    planar_cut,
    tait_graph,
    torus_quotient,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_NAMES",
    "ElementaryDivisors",
    "FiniteGraph",
    "LaurentMatrix",
    "LaurentPoly2",
    "MahlerResult",
    "TilingCensus",
    "TorusGraph",
    "TorusMap",
    "brute_force_tree_count",
    "build_builtin",
    "canonicalize",
    "census",
    "checkerboard",
    "cover_volume",
    "det",
    "dimer_char_poly",
    "dual_graph",
    "export_map",
    "faces",
    "format_poly",
    "fourier_tree_count",
    "kasteleyn_matrix",
    "kasteleyn_signs",
    "laplacian_poly",
    "link_volume",
    "load_map",
    "lobachevsky",
    "mahler_1var",
    "mahler_2var",
    "mahler_2var_grid",
    "overlaid_graph",
    "parse_poly",
    "planar_cut",
    "ratio_limit",
    "smith_normal_form",
    "tait_graph",
    "torsion_growth_series",
    "torsion_order",
    "torus_quotient",
    "tree_count",
    "tree_entropy",
    "verify_report",
    "volume_constants",
]
