"""Streaming algorithms under adversarial injections.

A library and experiment harness for one-pass algorithms on streams whose
good elements arrive in uniformly random order while an adversary injects
noise elements at positions chosen blindly (before the permutation is
drawn).  Ships a prefix-tree algorithm for cardinality-constrained monotone
submodular maximization, a two-branch maximum-matching algorithm with
3-augmenting-path collection, and the recurrence table certifying the
submodular algorithm's 0.55 approximation factor.
"""

from .errors import (
    InjectStreamError,
    InvalidInstanceError,
    InvariantError,
    PlanValidationError,
    PreconditionError,
    SizeLimitError,
)
from .generators import (
    ADVERSARY_STRATEGIES,
    MATCHING_KINDS,
    SUBMOD_KINDS,
    PlantedAugInstance,
    edges_from_stream,
    generate_matching_instance,
    generate_planted_3aug,
    generate_submod_instance,
    make_plan,
    random_edge_stream,
    sample_matching_pair,
)
from .geomgrid import snap_ceil_log, snap_floor_log
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    Summary,
    TrialRecord,
    config_from_dict,
    read_matching_instance_file,
    read_submod_instance_file,
    run_experiment,
    write_instance_file,
)
from .matching import (
    AugPath,
    AugPathStore,
    Edge,
    GuessRunStats,
    MatchConfig,
    Matching,
    RobustGreedyReport,
    apply_augmentations,
    count_3_augmentable,
    exact_max_matching,
    geometric_guess_run,
    greedy_matching,
    greedy_step,
    match_run,
    read_edge_stream,
    robust_greedy_check,
    three_aug_paths,
    write_edge_stream,
)
from .matching import live_guess_bound as matching_live_guess_bound
from .recurrence import (
    DominanceReport,
    RecurrenceTable,
    asymptote,
    compute_table,
    first_term_dominance,
    min_diagonal,
)
from .rng import MixedRadixRNG, PhiloxRNG, fisher_yates
from .stream_model import (
    ENUMERATION_LIMIT,
    Element,
    InjectedStream,
    InjectionPlan,
    InstanceSplit,
    build_stream,
    enumerate_streams,
    realize_stream,
    sample_permutation,
)
from .submodular import (
    AdditiveOracle,
    AxiomReport,
    CoverageInstance,
    CoverageOracle,
    GroundSet,
    Solution,
    SubmodularOracle,
    WeightedCoverageOracle,
    brute_force_opt,
    figure2_instance,
    marginal,
    read_coverage_instance,
    verify_axioms,
    write_coverage_instance,
)
from .tree_stream import (
    ExactKeys,
    GuessManager,
    IncreaseBuckets,
    LeafTrace,
    PrefixTree,
    RunStats,
    analysis_leaf_trace,
    best_solution,
    guess_run,
    live_guess_bound,
    node_count_bound,
    run_tree_stream,
    tree_process,
)

__version__ = "0.1.0"

__all__ = [
    "ADVERSARY_STRATEGIES",
    "AdditiveOracle",
    "AugPath",
    "AugPathStore",
    "AxiomReport",
    "CoverageInstance",
    "CoverageOracle",
    "DominanceReport",
    "ENUMERATION_LIMIT",
    "Edge",
    "Element",
    "ExactKeys",
    "ExperimentConfig",
    "ExperimentResult",
    "GroundSet",
    "GuessManager",
    "GuessRunStats",
    "IncreaseBuckets",
    "InjectStreamError",
    "InjectedStream",
    "InjectionPlan",
    "InstanceSplit",
    "InvalidInstanceError",
    "InvariantError",
    "LeafTrace",
    "MATCHING_KINDS",
    "MatchConfig",
    "Matching",
    "MixedRadixRNG",
    "PhiloxRNG",
    "PlanValidationError",
    "PlantedAugInstance",
    "PreconditionError",
    "PrefixTree",
    "RecurrenceTable",
    "RobustGreedyReport",
    "RunStats",
    "SUBMOD_KINDS",
    "SizeLimitError",
    "Solution",
    "SubmodularOracle",
    "Summary",
    "TrialRecord",
    "WeightedCoverageOracle",
    "analysis_leaf_trace",
    "apply_augmentations",
    "asymptote",
    "best_solution",
    "brute_force_opt",
    "build_stream",
    "compute_table",
    "config_from_dict",
    "count_3_augmentable",
    "edges_from_stream",
    "enumerate_streams",
    "exact_max_matching",
    "figure2_instance",
    "first_term_dominance",
    "fisher_yates",
    "generate_matching_instance",
    "generate_planted_3aug",
    "generate_submod_instance",
    "geometric_guess_run",
    "greedy_matching",
    "greedy_step",
    "guess_run",
    "live_guess_bound",
    "make_plan",
    "marginal",
    "match_run",
    "matching_live_guess_bound",
    "min_diagonal",
    "node_count_bound",
    "random_edge_stream",
    "read_coverage_instance",
    "read_edge_stream",
    "read_matching_instance_file",
    "read_submod_instance_file",
    "realize_stream",
    "robust_greedy_check",
    "run_experiment",
    "run_tree_stream",
    "sample_matching_pair",
    "sample_permutation",
    "snap_ceil_log",
    "snap_floor_log",
    "three_aug_paths",
    "tree_process",
    "verify_axioms",
    "write_coverage_instance",
    "write_edge_stream",
    "write_instance_file",
]
