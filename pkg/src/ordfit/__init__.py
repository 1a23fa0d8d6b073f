"""Penalized cumulative logit regression with ordinally scaled predictors.

The package fits proportional odds models where both the response and the
predictors are ordinal, using either a smoothing group-lasso penalty on
adjacent-level differences (whole-predictor selection with smooth level
effects) or a fused-lasso penalty (exact fusion of adjacent levels).  It
also provides an unpenalized Fisher-scoring baseline, warm-started lambda
paths, Brier-score cross-validation, stability selection, and a simulation
harness for selection-accuracy experiments.
"""

from ordfit.data import OrdinalDataset, DesignMatrices, build_design
from ordfit.errors import (
    OrdfitError,
    ConfigError,
    DataError,
    DimensionError,
    SeparationError,
)
from ordfit.model import (
    ModelParams,
    ProbabilityTable,
    linear_predictor,
    category_probs,
    log_likelihood,
    score,
    curvature_diag,
)
from ordfit.penalty import (
    PenaltySpec,
    difference_matrix,
    smooth_group_penalty,
    fused_penalty,
    split_code,
    to_split_params,
    from_split_params,
)
from ordfit.solver import (
    SolverConfig,
    FitResult,
    PathResult,
    fit_smooth_group,
    fit_fused,
    fit_numeric_lasso,
    fit_path,
    fit_mle_newton,
    lambda_max,
    auto_lambda_grid,
    intercept_only_thresholds,
)
from ordfit.selection import (
    CvResult,
    StabilityResult,
    brier_score,
    ranked_probability_score,
    cross_validate,
    stability_selection,
)
from ordfit.simlab import (
    SimulationScenario,
    GroundTruth,
    generate,
    roc_selection,
    roc_fusion,
    fusion_rates,
    run_replications,
)

__version__ = "0.1.0"

__all__ = [
    "OrdinalDataset",
    "DesignMatrices",
    "build_design",
    "OrdfitError",
    "ConfigError",
    "DataError",
    "DimensionError",
    "SeparationError",
    "ModelParams",
    "ProbabilityTable",
    "linear_predictor",
    "category_probs",
    "log_likelihood",
    "score",
    "curvature_diag",
    "PenaltySpec",
    "difference_matrix",
    "smooth_group_penalty",
    "fused_penalty",
    "split_code",
    "to_split_params",
    "from_split_params",
    "SolverConfig",
    "FitResult",
    "PathResult",
    "fit_smooth_group",
    "fit_fused",
    "fit_numeric_lasso",
    "fit_path",
    "fit_mle_newton",
    "lambda_max",
    "auto_lambda_grid",
    "intercept_only_thresholds",
    "CvResult",
    "StabilityResult",
    "brier_score",
    "ranked_probability_score",
    "cross_validate",
    "stability_selection",
    "SimulationScenario",
    "GroundTruth",
    "generate",
    "roc_selection",
    "roc_fusion",
    "fusion_rates",
    "run_replications",
]
