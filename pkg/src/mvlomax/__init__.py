"""Multivariate Pareto-II (Lomax) portfolios driven by shared gamma risk factors.

A 0/1 exposure matrix says which latent gamma factor hits which loss
coordinate; everything else — joint/marginal survival, densities, moments,
covariance and correlation, conditionals and regressions, minima/maxima laws,
VaR/CTE risk measures, exact samplers, and a scenario CLI — follows in closed
form from that object.
"""

from __future__ import annotations

from .errors import (
    InfiniteMomentError,
    InputValidationError,
    ModelError,
    NonConvergenceError,
)
from .specfun import SeriesResult, backend_name, gauss_2f1, hyp_3f2_unit, pochhammer
from .portfolio import (
    ExposureMatrix,
    ExposurePortfolio,
    PairDecomposition,
    build_portfolio,
    marginal_index,
    pair_decomposition,
    preset,
)
from .dist import (
    DensityExpansion,
    centred_regression,
    conditional_ddf_eq,
    conditional_ddf_gt,
    correlation,
    covariance,
    covariance_flexible,
    density_expansion,
    joint_ddf,
    joint_pdf,
    marginal_ddf,
    marginal_mean,
    marginal_var,
)
from .extremes import (
    ShapeMixture,
    maxima_ddf,
    minima_ddf,
    minima_mean,
    minima_mixture,
    moschopoulos_pmf,
)
from .risk import (
    QuantileGrid,
    RiskReport,
    cte_marginal,
    cte_maxima,
    cte_minima,
    economic_cte,
    risk_report,
    var_extreme,
    var_marginal,
    weighted_measure_mc,
)
from .sim import (
    SampleBatch,
    mc_estimate,
    sample_background_risk,
    sample_common_shock,
    sample_gamma_vector,
)

__version__ = "0.1.0"

__all__ = [
    "ModelError", "InputValidationError", "InfiniteMomentError",
    "NonConvergenceError",
    "SeriesResult", "backend_name", "pochhammer", "gauss_2f1", "hyp_3f2_unit",
    "ExposureMatrix", "ExposurePortfolio", "PairDecomposition",
    "build_portfolio", "marginal_index", "pair_decomposition", "preset",
    "DensityExpansion", "density_expansion", "joint_ddf", "joint_pdf",
    "marginal_ddf", "marginal_mean", "marginal_var", "covariance",
    "correlation", "covariance_flexible", "conditional_ddf_eq",
    "conditional_ddf_gt", "centred_regression",
    "ShapeMixture", "moschopoulos_pmf", "minima_mixture", "minima_ddf",
    "minima_mean", "maxima_ddf",
    "QuantileGrid", "RiskReport", "var_marginal", "cte_marginal",
    "var_extreme", "cte_minima", "cte_maxima", "economic_cte",
    "weighted_measure_mc", "risk_report",
    "SampleBatch", "sample_gamma_vector", "sample_background_risk",
    "sample_common_shock", "mc_estimate",
    "__version__",
]
