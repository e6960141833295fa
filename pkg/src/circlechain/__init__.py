"""Truncated inner analytic functions for real functions on the unit circle."""
from .classify import SingularityRecord, classify_all, classify_point, max_hardness
from .coeffs import (
    FourierCoefficients,
    GrowthReport,
    TaylorCoefficients,
    angular_derivative_coeffs,
    angular_primitive_coeffs,
    fourier_to_taylor,
    growth_order,
    taylor_to_fourier,
)
from .errors import (
    CircleChainError,
    ClassificationError,
    DomainError,
    NotIntegrableError,
    PipelineError,
    QuadratureError,
    ValidationError,
)
from .evalcore import DiskPoint, RhoLadder, eval_inner, limit_to_circle, regulated_sum
from .reconstruct import (
    DeltaComponent,
    ReconstructionResult,
    delta_taylor,
    detect_deltas,
    extended_fourier,
    reconstruct,
    verify_roundtrip,
)
from .sections import (
    PiecewisePolynomial,
    PiecewisePrimitive,
    QuadratureConfig,
    SectionedFunction,
    fourier_numeric,
    pp_differentiate,
    sectional_integrate,
)

__version__ = "0.1.0"
