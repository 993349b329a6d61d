"""Multivariate independence tests built on checkerboard copula estimates.

The pipeline: rank-transform data to a pseudo-sample, count box frequencies
over the uniform partitions of orders 2 and 3, measure the discrepancy of
the resulting sample copulas from the independence reference (total
variation, Hellinger, supremum, or Kullback-Leibler), and calibrate the
averaged statistic by Monte Carlo simulation under the null.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .checkerboard import (
    AnalyticCopula,
    CheckerboardCopula,
    checkerboard,
    clayton_copula,
    closed_form_c2_bivariate,
    closed_form_c2_trivariate,
    comonotone_copula,
    copula_box_volume,
    countermonotone_copula,
    frank_copula,
    frechet_mardia_copula,
    gumbel_copula,
    independence_copula,
)
from .core import (
    PiecewiseDensity,
    SubcopulaGrid,
    box_index,
    grid_box_volume,
    grid_box_volumes,
    multilinear_eval,
    product_subcopula_grid,
)
from .errors import (
    CheckerdepError,
    ConfigError,
    DataError,
    DivisibilityError,
    DomainError,
    NotACopulaError,
    TiesPresentError,
)
from .estimator import (
    FrequencyTensor,
    PseudoSample,
    frequency_tensor,
    pseudo_sample,
    sample_copula_density,
    subcopula_grid,
    truncate_to_multiple,
)
from .metrics import (
    StatisticKind,
    StatisticValue,
    eta_profile,
    eta_statistic,
    hellinger_to_uniform,
    kl_to_uniform,
    sup_to_independence,
    tv_between,
    tv_to_uniform,
)
from .montecarlo import (
    NullDistribution,
    PowerEstimate,
    TestReport,
    build_null,
    critical_value,
    estimate_power,
    p_value,
    test_independence,
)
from .samplers import (
    CopulaSamplerSpec,
    draw_sample,
    parse_sampler_spec,
    sample_archimedean,
    sample_elliptical,
    sample_elliptical_corr,
    sample_frechet_mardia,
    sample_gumbel_id_mixture,
    sample_null,
)
from .screen import PartitionHypothesis, ScreenReport, screen_partition

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    # core
    "PiecewiseDensity", "SubcopulaGrid", "box_index", "grid_box_volume",
    "grid_box_volumes", "multilinear_eval", "product_subcopula_grid",
    # estimator
    "FrequencyTensor", "PseudoSample", "frequency_tensor", "pseudo_sample",
    "sample_copula_density", "subcopula_grid", "truncate_to_multiple",
    # checkerboard
    "AnalyticCopula", "CheckerboardCopula", "checkerboard", "copula_box_volume",
    "clayton_copula", "closed_form_c2_bivariate", "closed_form_c2_trivariate",
    "comonotone_copula", "countermonotone_copula", "frank_copula",
    "frechet_mardia_copula", "gumbel_copula", "independence_copula",
    # metrics
    "StatisticKind", "StatisticValue", "eta_profile", "eta_statistic",
    "hellinger_to_uniform", "kl_to_uniform", "sup_to_independence",
    "tv_between", "tv_to_uniform",
    # samplers
    "CopulaSamplerSpec", "draw_sample", "parse_sampler_spec",
    "sample_archimedean", "sample_elliptical", "sample_elliptical_corr",
    "sample_frechet_mardia", "sample_gumbel_id_mixture", "sample_null",
    # montecarlo
    "NullDistribution", "PowerEstimate", "TestReport", "build_null",
    "critical_value", "estimate_power", "p_value", "test_independence",
    # screen
    "PartitionHypothesis", "ScreenReport", "screen_partition",
    # errors
    "CheckerdepError", "ConfigError", "DataError", "DivisibilityError",
    "DomainError", "NotACopulaError", "TiesPresentError",
]
