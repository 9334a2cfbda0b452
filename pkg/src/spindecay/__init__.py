"""Certified correlation-decay computations for two-state spin systems."""
from .core import (
    ANTIFERROMAGNETIC,
    BLUE,
    DEGENERATE,
    FERROMAGNETIC,
    GREEN,
    Classification,
    SpinSystem,
    alpha,
    alpha_sym,
    classify,
    edge_factor,
    fixed_point_derivative,
    recursion_f,
    swap_spins,
    symmetric_f,
)
from .errors import (
    BudgetExceededError,
    EnumerationCapError,
    GraphFormatError,
    InvalidParameterError,
    NoThresholdError,
    SpinDecayError,
    UniquenessError,
    ZeroWeightError,
)
from .estimator import (
    Auto,
    Depth,
    MarginalBounds,
    MBased,
    PartitionEstimate,
    approx_partition,
    bounds,
    decay_curve,
    estimate_marginal,
)
from .graphs import Boundary, Graph, Instance, from_edges, load, loads, max_degree
from .oracle import (
    ExactMarginal,
    ExactResult,
    exact_marginal,
    exact_partition,
    exact_saw_ratio,
    log_weight,
)
from .uniqueness import (
    ContractionBound,
    FixedPointResult,
    ThresholdReport,
    UniquenessResult,
    choose_M,
    contraction_bound,
    find_non_monotone_witness,
    fixed_point,
    gamma_threshold,
    hardcore_threshold,
    is_unique_up_to,
    soft_thresholds,
    uniqueness_profile,
    universal_lambda_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "ANTIFERROMAGNETIC",
    "BLUE",
    "DEGENERATE",
    "FERROMAGNETIC",
    "GREEN",
    "Auto",
    "Boundary",
    "BudgetExceededError",
    "Classification",
    "ContractionBound",
    "Depth",
    "EnumerationCapError",
    "ExactMarginal",
    "ExactResult",
    "FixedPointResult",
    "Graph",
    "GraphFormatError",
    "Instance",
    "InvalidParameterError",
    "MBased",
    "MarginalBounds",
    "NoThresholdError",
    "PartitionEstimate",
    "SpinDecayError",
    "SpinSystem",
    "ThresholdReport",
    "UniquenessError",
    "UniquenessResult",
    "ZeroWeightError",
    "alpha",
    "alpha_sym",
    "approx_partition",
    "bounds",
    "choose_M",
    "classify",
    "contraction_bound",
    "decay_curve",
    "edge_factor",
    "estimate_marginal",
    "exact_marginal",
    "exact_partition",
    "exact_saw_ratio",
    "find_non_monotone_witness",
    "fixed_point",
    "fixed_point_derivative",
    "from_edges",
    "gamma_threshold",
    "hardcore_threshold",
    "is_unique_up_to",
    "load",
    "loads",
    "log_weight",
    "max_degree",
    "recursion_f",
    "soft_thresholds",
    "swap_spins",
    "symmetric_f",
    "uniqueness_profile",
    "universal_lambda_threshold",
]
