"""Score-based subsampled linear regression with exact MSE theory."""

from .errors import (
    DegenerateScores,
    DimensionMismatch,
    EmptyPlot,
    EnumerationTooLarge,
    GenerationFailed,
    InvalidEntry,
    InvalidScores,
    OptimalityViolated,
    RankDeficient,
    SampledRankDeficient,
    SampleProjError,
)
from .estimators import FitResult, multitask_proj_fit, ols_fit, sample_ls_fit, sample_proj_fit
from .linalg import DesignMatrix, LeverageProfile, PseudoInverse, build_design, leverage_profile, pseudo_inverse
from .sampling import SampleDraw, all_draws, draw_with_replacement
from .scores import (
    FAMILIES,
    SamplingScores,
    compute_scores,
    leverage_scores,
    nsr_estimator_scores,
    nsr_predictor_scores,
    oracle_estimator_scores,
    oracle_predictor_scores,
    sqrt_leverage_scores,
    uniform_scores,
)
from .theory import MseReport, ProblemSpec, enumerate_mse, exact_mse, monte_carlo_mse, mse_upper_bound, optimal_gap

__version__ = "0.1.0"
