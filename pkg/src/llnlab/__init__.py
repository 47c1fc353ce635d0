"""llnlab: exact and simulated long-run sample-mean behaviour for
nonmeasurable payoffs on finite probability spaces."""

from .core import (
    DomainMismatchError,
    FieldPartition,
    FiniteSpace,
    PartitionError,
    RandomQuantity,
    UnknownLabelError,
    WeightSumError,
    ZeroWeightError,
    as_rational,
    build_space,
    discrete_field,
    expectation,
    generate_field,
    inner_measure,
    is_measurable,
    lower_expectation,
    majorant,
    measurable_core,
    measurable_hull,
    minorant,
    outer_measure,
    trivial_field,
    upper_expectation,
)
from .extensions import (
    BoundsError,
    ExtensionMeasure,
    FieldMismatchError,
    base_measure,
    extend_by_set,
    extend_max,
    extend_min,
    indicator,
    is_extension,
    mix,
    refined_field,
)
from .plans import (
    BlockAlternatingPlan,
    ConstantMixturePlan,
    CoordinatePlan,
    FactorialSchedule,
    GeometricEscalatingSchedule,
    RegimeMixturePlan,
    Scenario,
    exactness_threshold,
    is_min_coordinate,
    make_schedule,
    plan_for_target,
    schedule_ends,
    schedule_segments,
    simple_approx,
    target_mixture_weight,
    truncate,
)
from .engine import (
    DEFAULT_BUDGET,
    EVENT_KINDS,
    BudgetExceededError,
    CertificateReport,
    HypothesisError,
    TargetSet,
    Trajectory,
    certify_nonmeasurable,
    clt_tolerance,
    derive_seeds,
    evaluate_event_frequencies,
    exact_event_bounds,
    exact_plan_event_prob,
    expected_mean_profile,
    product_field,
    product_space,
    run_trajectories,
    sample_trajectory,
    standard_certify_plans,
    trajectory_within_envelope,
    variance_sum_diagnostic,
)

__version__ = "0.1.0"
