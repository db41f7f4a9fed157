"""Covariance of the log-average periodogram of a stationary Gaussian process.

The package provides the closed-form T x T covariance matrix of binned,
log-averaged spectral components (via a generalized hypergeometric series
kernel), the supporting special functions, closed-form non-integer moments
of the non-central chi-squared distribution, a reproducible Monte Carlo
verification harness, and a spectral-density estimator that smooths the
debiased log-average periodogram with optional decorrelation.
"""

__version__ = "0.1.0"

from .covkernel import (
    CorrelationTrace,
    LogAvgCovariance,
    SpectralCovariance,
    correlation_trace,
    logavg_covariance,
    noncentral_chisq_moment,
    spectral_covariance,
)
from .estimator import (
    DensityEstimate,
    EstimatorConfig,
    debiased_logavg,
    error_metrics,
    fit_spectral_density,
    simulation_study,
    spectral_density,
)
from .mc import McReport, empirical_logavg_cov
from .models import (
    AutocovModel,
    NonStationaryError,
    NotPositiveDefiniteError,
    ToeplitzCovariance,
    arma_autocovariance,
    polynomial_autocovariance,
    reference_arma,
    reference_polynomial,
    sample_gaussian,
    toeplitz_covariance,
)
from .specfun import (
    ConvergenceError,
    SeriesControl,
    digamma,
    hyp1f1,
    hyp2f1,
    log_gamma,
    log_pochhammer,
    logavg_cov_kernel,
    pochhammer,
    trigamma,
)
from .transform import (
    BinPartition,
    DegenerateBinError,
    SpectralComponents,
    dct1_matrix,
    log_average_periodogram,
    spectral_components,
)
