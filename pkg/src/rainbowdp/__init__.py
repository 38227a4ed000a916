"""Optimal (epsilon,delta)-differentially-private mechanisms on rainbow
graphs under homogeneous boundary conditions, with verification oracles
and a reproducible CLI."""

from .core import (
    DEFAULT_TOL,
    ColorSpace,
    PrivacyBudget,
    Rainbow,
    SimplexVector,
    dominates,
    is_close,
    lex_precedes,
    prefix_sums,
    subset_excess,
    tv_distance,
)
from .graph import (
    BoundaryGraph,
    Morphism,
    MorphismReport,
    RainbowGraph,
    Region,
    RegionDecomposition,
    UnconstrainedRegion,
    boundary_distances,
    boundary_node_id,
    build_boundary_graph,
    check_morphism,
    decompose_regions,
    line_graph,
    pullback,
)
from .mechanism import (
    INFINITE,
    BoundaryCondition,
    BoundaryReport,
    DpReport,
    DpViolation,
    EpsilonZero,
    InvalidBoundary,
    Mechanism,
    MissingRainbow,
    TauProfile,
    TrajectoryRow,
    TrajectoryTable,
    build_trajectory,
    closed_form_prefix,
    from_preference_order,
    is_boundary_homogeneous,
    line_mechanism,
    mechanism_dominates,
    optimal_mechanism,
    t_step,
    t_step_prefixes,
    tau_profile,
    to_preference_order,
    utility_eval,
    validate_boundary_condition,
    verify_dp,
)
from .oracle import (
    CloseSamples,
    Counterexample,
    FalsificationReport,
    NoOptimalReport,
    dominance_falsify,
    homogenized_pentagon,
    is_close_bruteforce,
    no_optimal_demo,
    pentagon_graph,
    sample_close,
)

__version__ = "0.1.0"
