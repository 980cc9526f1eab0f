"""Single-facility location on the line with z outliers.

Exact solvers for the outlier-adjusted utilitarian and egalitarian
objectives, the strategyproof mechanisms under study (order statistics,
phantom medians, the randomized median, prediction-augmented In-Range),
their closed-form guarantees, adversarial instance families, and a
verification harness that audits strategyproofness and approximation
ratios against brute-force oracles.
"""

from .core import (
    Instance,
    InvalidInstance,
    ObjectiveKind,
    Rational,
    SortedProfile,
    format_rational,
    instance_to_json,
    order_statistic,
    parse_instance,
    parse_rational,
)
from .generators import family_names, gen_family, gen_random
from .mechanisms import (
    MechanismSpec,
    RandomizedOutcome,
    in_range,
    kth_order_statistic,
    left_median,
    left_z,
    oracle_mechanism,
    phantom_median,
    rand_median,
)
from .objectives import (
    Evaluation,
    OptimalSolution,
    brute_force_opt,
    eval_cost,
    eval_oracle,
    opt_egalitarian,
    opt_utilitarian,
    optimal_solution,
)
from .predictions import (
    DeltaIndices,
    PredictionError,
    delta_c,
    delta_index,
    delta_r,
    f_delta,
    f_eta,
    f_rand,
    f_robust,
    f_util,
    gamma_max,
    prediction_error,
)
from .verification import (
    RatioReport,
    SweepResult,
    SweepRow,
    ViolationCertificate,
    check_corollary_path,
    check_sp_deterministic,
    check_sp_in_expectation,
    default_deviation_grid,
    measure_ratio,
    sequence_is_constant,
    sequence_outcomes,
    sp_scan,
    sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
