"""Weighted Riesz potentials |x|^-beta int f(y) |y|^-alpha |x-y|^-lam dy on radial functions."""

from .errors import (
    ConfigError,
    DimensionError,
    DivergentNormError,
    InsufficientData,
    NonPositiveIterate,
    NotInLError,
    NumericError,
    OutOfRangeError,
    QuadratureError,
    RieszError,
    SignError,
    SingularArgumentError,
    SubcriticalityError,
    UnsupportedDimension,
    UnsupportedForm,
)
from .estimation import (
    FitReport,
    PowerConfig,
    PowerResult,
    SweepRow,
    envelope_boundedness,
    fit_endpoint_exponent,
    lower_bound_constant,
    power_method_estimate,
    power_sweep,
    rows_to_csv,
    sweep,
)
from .exponents import ExponentChart, GPoint, RieszParams, conjugate_q, exponent_chart, in_G, validate_params
from .kernel import AngularKernelConfig, angular_kernel, kernel_diagonal_exponent, phi
from .operator import (
    PotentialEvaluator,
    SampledPotential,
    apply,
    bilinear,
    dilation_identity_check,
    duality_witness,
    riesz_ratio,
)
from .oracle import McEstimate, bilinear_mc, potential_at_point_mc
from .profiles import (
    BUILTINS,
    PowerLogPiece,
    QuadratureConfig,
    RadialProfile,
    in_L_interval,
    in_Lp,
    lp_norm_closed,
    lp_norm_quad,
    make_f0,
    make_g0,
    make_h,
    sphere_area,
)

__version__ = "0.1.0"
