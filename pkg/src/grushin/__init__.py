"""Numerical toolkit for the generalized Grushin plane."""

from .ccsolver import (
    Branch,
    DEFAULT_REGION,
    ComparabilityReport,
    Rect,
    StaircaseSolution,
    comparability_scan,
    grid_cc_distance,
    staircase_distance,
)
from .core import (
    GrushinPoint,
    MetricParams,
    PolyPath,
    euclidean_distance,
    linf_distance,
    path_length,
    quasidistance,
)
from .jacobian import (
    DensityProbe,
    NonIntegrableWeight,
    Regime,
    WeightExponent,
    acl_integrability,
    alpha_for_beta,
    area_distortion,
    beta_for_alpha,
    jacobian_density,
    loglog_slope,
    semmes_quasidistance,
)
from .qsmaps import (
    CaseLabel,
    Norm,
    SandwichCheck,
    ScaleFunction,
    classify_case,
    eta_estimate,
    forward_map,
    inverse_map,
    sandwich_check,
    sandwich_ratios,
)

__version__ = "0.1.0"
