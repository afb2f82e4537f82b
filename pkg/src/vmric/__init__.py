"""Model selection for misspecified multivariate forecasting models.

The package scores scalar-predictor forecasting models with the vectorial
misspecification-resistant information criterion (VMRIC), the spectral norm
of the misspecification index plus a vanishing multiple of the spectral norm
of the variability index.
"""
from .criteria import (
    CriterionValue,
    IndexMatrices,
    PenaltySpec,
    aic_bic,
    estimate_cross_cov,
    estimate_indices,
    estimate_mi,
    estimate_vi,
    mric_univariate,
    penalty_weight,
    spectral_norm,
    vmric,
)
from .errors import (
    ConfigError,
    DegeneratePredictorError,
    LagTooLargeError,
    NonstationaryError,
    SingularCovarianceError,
    VmricError,
)
from .estimation import OlsFit, Records, SampleSet, fit_ols, forecast, read_records_csv, sample_second_moment
from .kernels import BACKEND
from .selection import CandidateModel, SelectionReport, evaluate_candidates, selection_frequencies

__version__ = "0.1.0"
