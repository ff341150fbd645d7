"""High-order nodal DG solver with per-element adaptive volume terms.

The volume integral of each element is chosen per Runge-Kutta stage between
the cheap weak form, the entropy-conservative flux-differencing form, and a
subcell finite-volume blend, driven by entropy-production or modal shock
indicators.
"""

from .backend import BACKEND, available_backends
from .equations import (
    AdmissibilityError,
    ConfigurationError,
    EquationDescriptor,
    FluxKind,
    equation,
)
from .indicators import IndicatorConfig
from .operators import OperatorSet, QuadratureRule, build_operators, gauss_lobatto
from .semidiscretization import (
    DivergenceError,
    Mesh,
    SemidiscretizationConfig,
    SolutionField,
    StageReport,
    compute_rhs,
)
from .time_integration import (
    LSRK54_CARPENTER_KENNEDY,
    SSPRK54_RUUTH,
    IntegrationResult,
    StepController,
    cfl_timestep,
    integrate,
    rk_method,
)
from .volume import VolumeSchemeMode

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "available_backends",
    "AdmissibilityError",
    "ConfigurationError",
    "DivergenceError",
    "EquationDescriptor",
    "FluxKind",
    "IndicatorConfig",
    "IntegrationResult",
    "Mesh",
    "OperatorSet",
    "QuadratureRule",
    "SemidiscretizationConfig",
    "SolutionField",
    "StageReport",
    "StepController",
    "VolumeSchemeMode",
    "LSRK54_CARPENTER_KENNEDY",
    "SSPRK54_RUUTH",
    "build_operators",
    "cfl_timestep",
    "compute_rhs",
    "equation",
    "gauss_lobatto",
    "integrate",
    "rk_method",
    "__version__",
]
