"""Graph p-Laplacian Dirichlet eigenvalues, exact Cheeger constants, and
exhaustive verification of sharp extremal inequalities at small scale."""

from .cheeger import CheegerResult, dirichlet_cheeger, lambda_1_1
from .errors import (
    BoundaryViolation,
    Disconnected,
    EmptyInterior,
    ExponentOutOfRange,
    NoBoundary,
    NotConverged,
    PlapError,
    SpecOutOfRange,
    TooLarge,
    ZeroFunction,
)
from .graphs import (
    BoundaryPartition,
    Graph,
    boundary_partition,
    canonical_key,
    enumerate_connected_by_edges,
    enumerate_connected_by_vertices,
    format_edge_list,
    graph_from_json_dict,
    graph_to_json_dict,
    is_isomorphic,
    make_cycle,
    make_path,
    make_tadpole,
    parse_edge_list,
)
from .spectral import (
    EigenResult,
    SolverOptions,
    apply_p_laplacian,
    dirichlet_energy,
    eigen_residual,
    first_eigenpair,
    linear_first_dirichlet,
    p_norm_pow,
    rayleigh_gradient,
    rayleigh_quotient,
)
from .verify import (
    FamilyScan,
    VerificationReport,
    verify_cheeger_upper_bound,
    verify_fk_edges,
    verify_fk_p1,
    verify_fk_vertices,
    verify_lemma_head_max,
    verify_p_limit,
    verify_path_chain,
    verify_tadpole_comparison,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryPartition",
    "BoundaryViolation",
    "CheegerResult",
    "Disconnected",
    "EigenResult",
    "EmptyInterior",
    "ExponentOutOfRange",
    "FamilyScan",
    "Graph",
    "NoBoundary",
    "NotConverged",
    "PlapError",
    "SolverOptions",
    "SpecOutOfRange",
    "TooLarge",
    "VerificationReport",
    "ZeroFunction",
    "apply_p_laplacian",
    "boundary_partition",
    "canonical_key",
    "dirichlet_cheeger",
    "dirichlet_energy",
    "eigen_residual",
    "enumerate_connected_by_edges",
    "enumerate_connected_by_vertices",
    "first_eigenpair",
    "format_edge_list",
    "graph_from_json_dict",
    "graph_to_json_dict",
    "is_isomorphic",
    "lambda_1_1",
    "linear_first_dirichlet",
    "make_cycle",
    "make_path",
    "make_tadpole",
    "p_norm_pow",
    "parse_edge_list",
    "rayleigh_gradient",
    "rayleigh_quotient",
    "verify_cheeger_upper_bound",
    "verify_fk_edges",
    "verify_fk_p1",
    "verify_fk_vertices",
    "verify_lemma_head_max",
    "verify_p_limit",
    "verify_path_chain",
    "verify_tadpole_comparison",
]
