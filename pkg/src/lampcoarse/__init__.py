"""Finite-scale coarse geometry of lamplighter graphs.

Exact wreath-product metrics, coarse homotopy and persistence certificates,
leaves and aptolic maps, Følner sets and quasi-isometry checks, all on
explicit finite windows.
"""

from .amenable import (
    QIMap,
    folner_boxes,
    folner_wreath,
    qi_verify,
    quasi_inverse,
    quasi_kappa_check,
    toward_end_map,
    tree_subtree_boundary,
    aptolic_amenable,
    aptolic_nonamenable,
)
from .errors import (
    CapExceeded,
    CoveringError,
    DisconnectedGraph,
    LampcoarseError,
    NearCommonLeaf,
    RungError,
    UnknownVertex,
    WindowError,
)
from .graph import (
    Graph,
    ball,
    boundary,
    distances_from,
    ends_profile,
    growth,
    isomorphic,
    thicken,
)
from .homotopy import (
    Covering,
    coarse_homotopic,
    elementary_move,
    is_coarsely_trivial,
    lamp_io_covering,
    nerve_projection,
    persistent_intersection,
    stringy_witness,
)
from .leaves import (
    AptolicMap,
    Leaf,
    alpha_inclusion_test,
    aptolic_apply,
    aptolic_qi_fit,
    detect_square,
    dist_to_leaf,
    divisibility_test,
    ladder_check,
    leaf_coarse_intersection,
)
from .wreath import (
    Colouring,
    LampVertex,
    WreathElement,
    WreathGroup,
    WreathSpace,
    cayley,
    dead_end_depth,
    dl_graph,
    lamp_distance,
    lamp_geodesic,
    materialize,
    neighbors,
    psi_embed,
    transport_bilip,
    ts_path,
    wreath_inv,
    wreath_mul,
)

__all__ = [
    "AptolicMap",
    "CapExceeded",
    "Colouring",
    "Covering",
    "CoveringError",
    "DisconnectedGraph",
    "Graph",
    "LampVertex",
    "LampcoarseError",
    "Leaf",
    "NearCommonLeaf",
    "QIMap",
    "RungError",
    "UnknownVertex",
    "WindowError",
    "WreathElement",
    "WreathGroup",
    "WreathSpace",
    "alpha_inclusion_test",
    "aptolic_amenable",
    "aptolic_apply",
    "aptolic_nonamenable",
    "aptolic_qi_fit",
    "ball",
    "boundary",
    "cayley",
    "coarse_homotopic",
    "dead_end_depth",
    "detect_square",
    "dist_to_leaf",
    "distances_from",
    "divisibility_test",
    "dl_graph",
    "elementary_move",
    "ends_profile",
    "folner_boxes",
    "folner_wreath",
    "growth",
    "is_coarsely_trivial",
    "isomorphic",
    "ladder_check",
    "lamp_distance",
    "lamp_geodesic",
    "lamp_io_covering",
    "leaf_coarse_intersection",
    "materialize",
    "neighbors",
    "nerve_projection",
    "persistent_intersection",
    "psi_embed",
    "qi_verify",
    "quasi_inverse",
    "quasi_kappa_check",
    "stringy_witness",
    "thicken",
    "toward_end_map",
    "transport_bilip",
    "tree_subtree_boundary",
    "ts_path",
    "wreath_inv",
    "wreath_mul",
]

__version__ = "0.1.0"
