"""Neighbor graphs, finite type detection and skeletons of planar self-similar sets."""

from .errors import (
    CapExceeded,
    DegenerateCycle,
    IfskelError,
    Inconclusive,
    NoWalk,
    NotConnected,
    NotSingleMatrix,
    NotStable,
    ParseError,
    ScaleOne,
    ValidationError,
)
from .geometry import Point, Similitude, approx_eq, canonical_key, compose, fixed_point, inverse
from .ifs import (
    IFS,
    BoundingBall,
    SingleMatrixForm,
    bounding_ball,
    detect_single_matrix,
    is_uniform_ratio,
    iterate_ifs,
    sample_attractor,
)
from .symbolic import EPCoding, ep_coding_of_point, pi_eval
from .neighbor import (
    CAP_EXCEEDED,
    FINITE_TYPE,
    NeighborEdge,
    NeighborGraph,
    NeighborVertex,
    basic_neighbor_maps,
    build_neighbor_graph,
    dstar_discreteness_check,
    is_feasible,
)
from .graphs import EPWalk, HataGraph, find_ep_walk, hata_graph, is_connected, spanning_tree
from .skeleton import (
    BifurcationPair,
    Skeleton,
    SkeletonReport,
    bifurcation_pair,
    build_skeleton,
    check_zipper,
    verify_iteration_invariance,
    verify_skeleton,
    walk_to_codings,
)

__version__ = "0.1.0"

__all__ = [
    "IFS",
    "BifurcationPair",
    "BoundingBall",
    "CAP_EXCEEDED",
    "CapExceeded",
    "DegenerateCycle",
    "EPCoding",
    "EPWalk",
    "FINITE_TYPE",
    "HataGraph",
    "IfskelError",
    "Inconclusive",
    "NeighborEdge",
    "NeighborGraph",
    "NeighborVertex",
    "NoWalk",
    "NotConnected",
    "NotSingleMatrix",
    "NotStable",
    "ParseError",
    "Point",
    "ScaleOne",
    "Similitude",
    "SingleMatrixForm",
    "Skeleton",
    "SkeletonReport",
    "ValidationError",
    "approx_eq",
    "basic_neighbor_maps",
    "bifurcation_pair",
    "bounding_ball",
    "build_neighbor_graph",
    "build_skeleton",
    "canonical_key",
    "check_zipper",
    "compose",
    "detect_single_matrix",
    "dstar_discreteness_check",
    "ep_coding_of_point",
    "find_ep_walk",
    "fixed_point",
    "hata_graph",
    "inverse",
    "is_connected",
    "is_feasible",
    "is_uniform_ratio",
    "iterate_ifs",
    "pi_eval",
    "sample_attractor",
    "spanning_tree",
    "verify_iteration_invariance",
    "verify_skeleton",
    "walk_to_codings",
]
