"""Equilibrium payoff set computation for two-player repeated games
with imperfect public monitoring and public randomization."""

from .aps import (
    BResult,
    Certificate,
    ICSystem,
    Refusal,
    Report,
    SolverConfig,
    apply_B,
    enforceable_payoffs,
    ic_constraints,
    solve,
    verify_enforceability,
)
from .game import (
    GameFormatError,
    MinmaxPair,
    PayoffSetPair,
    StageGame,
    feasible_set,
    individually_rational_set,
    minmax,
    parse_game,
    pure_nash,
    serialize_game,
)
from .geometry import (
    DegenerateInputError,
    PolygonH,
    PolygonV,
    Tolerances,
    UnboundedSetError,
    area,
    convex_hull,
    hausdorff,
    intersect_halfplane,
    rdp_simplify,
    to_halfspaces,
    to_vertices,
)
from .vertex_enum import (
    HPolytope,
    UnboundedPolytopeError,
    VertexSet,
    affine_image_2d,
    enumerate_vertices,
    product_polytope,
)

__version__ = "0.1.0"

__all__ = [
    "BResult",
    "Certificate",
    "DegenerateInputError",
    "GameFormatError",
    "HPolytope",
    "ICSystem",
    "MinmaxPair",
    "PayoffSetPair",
    "PolygonH",
    "PolygonV",
    "Refusal",
    "Report",
    "SolverConfig",
    "StageGame",
    "Tolerances",
    "UnboundedPolytopeError",
    "UnboundedSetError",
    "VertexSet",
    "affine_image_2d",
    "apply_B",
    "area",
    "convex_hull",
    "enforceable_payoffs",
    "enumerate_vertices",
    "feasible_set",
    "hausdorff",
    "ic_constraints",
    "individually_rational_set",
    "intersect_halfplane",
    "minmax",
    "parse_game",
    "product_polytope",
    "pure_nash",
    "rdp_simplify",
    "serialize_game",
    "solve",
    "to_halfspaces",
    "to_vertices",
    "verify_enforceability",
]
