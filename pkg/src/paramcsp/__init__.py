"""Weighted Boolean constraint satisfaction with parameterized solvers.

The public surface re-exports the relation and instance types, the direct
profile-class solvers, the guess-and-check machine layer, the partial-tuple
tables, and the document formats. The ``paramcsp`` console script fronts the
same operations.
"""

from .errors import (
    BudgetExceededError,
    CapacityError,
    DomainError,
    NotApplicableError,
    ParamCSPError,
    UsageError,
    ValidationError,
)
from .fpt_solvers import (
    ProfileClass,
    SolveStats,
    compute_h,
    profile_classes,
    shared_weight_set,
    solve_w_kt,
    solve_w_kt_with_stats,
    solve_w_kue,
    solve_w_kue_with_stats,
)
from .formats import (
    FORMAT_VERSION,
    parse_instance,
    parse_machine,
    parse_relation,
    serialize_instance,
    serialize_machine,
)
from .instances import (
    PROFILES,
    Constraint,
    Instance,
    InstanceConfig,
    WeightKind,
    WeightParameter,
    brute_force_solve,
    lift_kle_to_k,
    param_e,
    param_t,
    param_u,
    random_instance,
    reduce_parity_multiplicity,
    satisfies,
    weight_relation,
)
from .machines import (
    ALWAYS_REJECT,
    AlwaysReject,
    AppearanceChecker,
    CombinedChecker,
    CompletionReduction,
    CWChecker,
    GuessCheckMachine,
    SimulationResult,
    build_cw_tables,
    combine_machines,
    completion_reduction,
    delta_set,
    explicitize_w_body,
    inclusion_exclusion_union,
    reduce_appearance,
    reduce_completion,
    reduce_cw,
    simulate,
    solve_wd_pipeline,
)
from .partials import (
    DEFAULT_CAPACITY,
    PartialsTable,
    characterize_membership,
    completions,
    compute_partials,
)
from .relations import (
    AffineCost,
    CostModel,
    CWRelation,
    ExplicitRelation,
    Relation,
    WeightSet,
    WeightSetKind,
    WRelation,
    ceil_log2,
    default_checker_cost,
    membership_cost,
    relation_membership,
    weightset_contains,
)

__version__ = "0.1.0"

__all__ = [
    "ALWAYS_REJECT",
    "AffineCost",
    "AlwaysReject",
    "AppearanceChecker",
    "BudgetExceededError",
    "CapacityError",
    "CombinedChecker",
    "CompletionReduction",
    "Constraint",
    "CostModel",
    "CWChecker",
    "CWRelation",
    "DEFAULT_CAPACITY",
    "DomainError",
    "ExplicitRelation",
    "FORMAT_VERSION",
    "GuessCheckMachine",
    "Instance",
    "InstanceConfig",
    "NotApplicableError",
    "PROFILES",
    "ParamCSPError",
    "PartialsTable",
    "ProfileClass",
    "Relation",
    "SimulationResult",
    "SolveStats",
    "UsageError",
    "ValidationError",
    "WeightKind",
    "WeightParameter",
    "WeightSet",
    "WeightSetKind",
    "WRelation",
    "brute_force_solve",
    "build_cw_tables",
    "ceil_log2",
    "characterize_membership",
    "combine_machines",
    "completion_reduction",
    "completions",
    "compute_h",
    "compute_partials",
    "default_checker_cost",
    "delta_set",
    "explicitize_w_body",
    "inclusion_exclusion_union",
    "lift_kle_to_k",
    "membership_cost",
    "param_e",
    "param_t",
    "param_u",
    "parse_instance",
    "parse_machine",
    "parse_relation",
    "profile_classes",
    "random_instance",
    "reduce_appearance",
    "reduce_completion",
    "reduce_cw",
    "reduce_parity_multiplicity",
    "relation_membership",
    "satisfies",
    "serialize_instance",
    "serialize_machine",
    "shared_weight_set",
    "simulate",
    "solve_w_kt",
    "solve_w_kt_with_stats",
    "solve_w_kue",
    "solve_w_kue_with_stats",
    "solve_wd_pipeline",
    "weight_relation",
    "weightset_contains",
]
