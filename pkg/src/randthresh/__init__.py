"""Threshold of sufficient randomness for causal inference from 2x2 tables."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AllDegenerate,
    ConstructionFailed,
    DegenerateMarginal,
    EmptyRange,
    GenerationFailed,
    NotFeasible,
    NotRealizable,
    RandThreshError,
    SigmaOutOfRange,
    ZeroCell,
    ZeroCellWarning,
    ZeroMargin,
)
from .table import (  # noqa: E402
    AssociationMeasure,
    CellProbabilities,
    ContingencyTable,
    Margins,
    Measure,
    association,
    chi_squared,
    covariance_ed,
    from_counts,
    margins,
    phi,
)
from .realizability import RealizableRange, is_realizable, sigma_bounds, witness_table  # noqa: E402
from .realizability import range as realizable_range  # noqa: E402
from .threshold import (  # noqa: E402
    ComputationPath,
    Decision,
    RandomnessSpec,
    ThresholdReport,
    Verdict,
    decide,
    or_to_rr,
    rr_to_or,
    threshold,
    threshold_from_counts,
    threshold_from_summary,
    threshold_from_table,
)
from .latent import (  # noqa: E402
    DiscreteLatentDistribution,
    RandomnessSummary,
    TwoPointConstruction,
    expected_cells,
    is_feasible,
    lower_bound_check,
    optimal_two_point,
    random_feasible,
    summarize,
    two_point_with_coefficients,
)
from .inference import BootstrapResult, bootstrap_T  # noqa: E402
from .sweep import SweepGrid, sweep_T_over_prevalence, sweep_T_vs_association  # noqa: E402
from .estimator import RandomnessThreshold, ThresholdTransformer  # noqa: E402
