"""Control-energy security analysis for networked consensus dynamics.

Builds row-stochastic consensus networks, computes finite-horizon
controllability Gramians and their principal submatrices, derives
target-control energies, optimal input schedules, and security metrics,
and machine-checks the structural and asymptotic properties those
quantities are claimed to satisfy.
"""

from .audit import (
    AuditReport,
    CheckResult,
    NegativeInverseGraph,
    audit_asymptotics,
    audit_corollary1,
    audit_cutset,
    audit_theorem1,
    audit_theorem2,
    merge_reports,
    negative_inverse_graph,
)
from .dynamics import Trajectory, VerificationResult, simulate, verify_optimal_input
from .errors import (
    ConnectivityFailure,
    ConvergenceFailure,
    DegenerateProjection,
    DimensionMismatch,
    DuplicateEdge,
    IndexOutOfRange,
    NetctlError,
    NodeUnreachable,
    NotACutset,
    NotControllable,
    NotErgodic,
    NotPositiveDefinite,
    RowSumError,
)
from .gramian import (
    AsymptoticDecomposition,
    ConsensusSystem,
    GramianBundle,
    asymptotic_decomposition,
    compute_gramian,
    gramian_from_impulses,
    gramian_submatrix,
    impulse_response,
    left_perron,
    min_positive_horizon,
)
from .kernels import (
    EigenPairs,
    SymMatrix,
    connected_undirected,
    explicit_inverse,
    load_matrix_csv,
    save_matrix_csv,
    solve_spd,
    spd_check,
    sym_eig,
)
from .metrics import (
    ControllabilityWitness,
    InputSequence,
    MetricsReport,
    cutset_energy,
    full_target_security,
    metrics_report,
    node_energies,
    node_energy,
    optimal_projection_input,
    optimal_target_input,
    projection_energy,
    projection_security,
    target_control_energy,
    target_controllable,
    target_gramian,
    target_security,
)
from .netgraph import (
    ErgodicityReport,
    WeightedDigraph,
    build_graph,
    connected_pattern,
    ergodicity,
    is_separating_cutset,
    isolated_set,
    load_network,
    min_separating_cutset,
    network_json,
    node_set,
    random_geometric,
    save_network,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticDecomposition",
    "AuditReport",
    "CheckResult",
    "ConnectivityFailure",
    "ConsensusSystem",
    "ControllabilityWitness",
    "ConvergenceFailure",
    "DegenerateProjection",
    "DimensionMismatch",
    "DuplicateEdge",
    "EigenPairs",
    "ErgodicityReport",
    "GramianBundle",
    "IndexOutOfRange",
    "InputSequence",
    "MetricsReport",
    "NegativeInverseGraph",
    "NetctlError",
    "NodeUnreachable",
    "NotACutset",
    "NotControllable",
    "NotErgodic",
    "NotPositiveDefinite",
    "RowSumError",
    "SymMatrix",
    "Trajectory",
    "VerificationResult",
    "WeightedDigraph",
    "audit_asymptotics",
    "audit_corollary1",
    "audit_cutset",
    "audit_theorem1",
    "audit_theorem2",
    "asymptotic_decomposition",
    "build_graph",
    "compute_gramian",
    "connected_pattern",
    "connected_undirected",
    "cutset_energy",
    "ergodicity",
    "explicit_inverse",
    "full_target_security",
    "gramian_from_impulses",
    "gramian_submatrix",
    "impulse_response",
    "is_separating_cutset",
    "isolated_set",
    "left_perron",
    "load_matrix_csv",
    "load_network",
    "merge_reports",
    "metrics_report",
    "min_positive_horizon",
    "min_separating_cutset",
    "negative_inverse_graph",
    "network_json",
    "node_energies",
    "node_energy",
    "node_set",
    "optimal_projection_input",
    "optimal_target_input",
    "projection_energy",
    "projection_security",
    "random_geometric",
    "save_matrix_csv",
    "save_network",
    "simulate",
    "solve_spd",
    "spd_check",
    "sym_eig",
    "target_control_energy",
    "target_controllable",
    "target_gramian",
    "target_security",
    "verify_optimal_input",
]
