"""Indicators deciding the per-element, per-stage volume scheme.

Three flavors:

* rigorous: a-posteriori, keeps the weak form only when it produces *less*
  entropy than the flux-differencing form, whose entropy production is known
  analytically from the surface integral of the entropy potential
  (``psi`` telescoping) without running the kernel;
* heuristic: a-posteriori, keeps the weak form while its entropy production
  stays below a user bound ``sigma`` (measured in reference space so the
  bound transfers across meshes);
* shock capturing: a-priori modal smoothness indicator controlling the
  convex DG-FV blending factor ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .equations import (
    ConfigurationError,
    EquationDescriptor,
    conserved_to_primitive,
)
from .operators import OperatorSet
from .volume import ElementView, VolumeContribution

__all__ = [
    "KAPPA",
    "IndicatorConfig",
    "SchemeChoice",
    "indicator_threshold",
    "entropy_production",
    "fd_entropy_production_via_potential",
    "rigorous_select",
    "heuristic_select",
    "modal_shock_indicator",
    "shock_capturing_select",
    "indicator_values",
]

# logistic steepness; log((1 - 1e-4) / 1e-4) ~ 9.21024
KAPPA = math.log((1.0 - 1e-4) / 1e-4)

_INDICATOR_VARIABLES = ("solution", "density", "pressure",
                        "density_times_pressure")


def indicator_threshold(p: int) -> float:
    """Degree-dependent threshold of the modal indicator."""
    return 0.5 * 10.0 ** (-1.8 * (p + 1) ** 0.25)


@dataclass(frozen=True)
class IndicatorConfig:
    """Parameters of the selection indicators.

    ``smooth_beta`` applies one diffusive pass over face neighbors
    (``beta_e = max(beta_e, beta_neighbor / 2)``) so the stabilized region
    extends one element beyond where the modal energies fire.
    """

    sigma: float = 0.0
    indicator_variable: str = "density_times_pressure"
    beta_min: float = 0.001
    beta_max: float = 0.5
    sc_default: str = "WF"
    smooth_beta: bool = False

    def __post_init__(self):
        if not math.isfinite(self.sigma) and self.sigma == self.sigma:
            pass  # +-inf allowed, nan is not
        if self.sigma != self.sigma:
            raise ConfigurationError("sigma must not be NaN")
        if not 0.0 <= self.beta_min <= self.beta_max <= 1.0:
            raise ConfigurationError(
                "need 0 <= beta_min <= beta_max <= 1, got "
                f"{self.beta_min}, {self.beta_max}"
            )
        if self.indicator_variable not in _INDICATOR_VARIABLES:
            raise ConfigurationError(
                f"unknown indicator variable {self.indicator_variable!r}"
            )
        if self.sc_default not in ("WF", "FD"):
            raise ConfigurationError("sc_default must be 'WF' or 'FD'")


@dataclass(frozen=True)
class SchemeChoice:
    """Per-element decision plus the entropy productions that produced it."""

    kind: str  # 'WF' | 'FD' | 'Blend'
    beta: float = 0.0
    s_wf: float = math.nan
    s_fd: float = math.nan


def _tensor_weights(ops: OperatorSet, ndims: int) -> np.ndarray:
    w = ops.weights
    if ndims == 1:
        return w
    return np.kron(w, w)  # n = ix + (p+1)*iy -> weight w[iy] * w[ix]


def entropy_production(elem: ElementView, contribution: VolumeContribution,
                       ops: OperatorSet, eq: EquationDescriptor) -> float:
    """Reference-space entropy production of a volume contribution.

    ``sum_j wbar_j w(u_j) . udot_j`` with tensor-product quadrature weights
    ``wbar``; the physical rate is this value times the element Jacobian.
    """
    u = np.ascontiguousarray(elem.u, dtype=float)[None]
    rate = np.ascontiguousarray(contribution.rate, dtype=float)[None]
    wbar = _tensor_weights(ops, elem.ndims)
    out = np.empty(1)
    kernels.entropy_dot(eq.eq_code, eq.gamma, u, rate, wbar, out)
    return float(out[0])


def fd_entropy_production_via_potential(elem: ElementView,
                                        eq: EquationDescriptor,
                                        ops: OperatorSet) -> float:
    """Entropy production of the flux-differencing volume term, kernel-free.

    Per direction this is the metric-scaled difference of the entropy
    potential across opposite element faces, weighted by the transverse
    quadrature weights.
    """
    u = np.ascontiguousarray(elem.u, dtype=float)[None]
    metric = np.asarray(elem.metric, dtype=float)
    out = np.empty(1)
    kernels.psi_telescope(eq.eq_code, eq.gamma, u, elem.degree, elem.ndims,
                          ops.weights, metric, out)
    return float(out[0])


def rigorous_select(elem: ElementView, wf_contribution: VolumeContribution,
                    eq: EquationDescriptor, ops: OperatorSet) -> SchemeChoice:
    """Keep the weak form iff it produces strictly less entropy than FD."""
    s_wf = entropy_production(elem, wf_contribution, ops, eq)
    s_fd = fd_entropy_production_via_potential(elem, eq, ops)
    kind = "WF" if s_wf - s_fd < 0.0 else "FD"
    return SchemeChoice(kind=kind, s_wf=s_wf, s_fd=s_fd)


def heuristic_select(elem: ElementView, wf_contribution: VolumeContribution,
                     eq: EquationDescriptor, ops: OperatorSet,
                     sigma: float) -> SchemeChoice:
    """Keep the weak form while its entropy production stays below sigma."""
    s_wf = entropy_production(elem, wf_contribution, ops, eq)
    kind = "WF" if s_wf < sigma else "FD"
    return SchemeChoice(kind=kind, s_wf=s_wf)


def indicator_values(eq: EquationDescriptor, u: np.ndarray,
                     variable: str) -> np.ndarray:
    """Nodal indicator quantity: the solution itself or rho / p / rho*p."""
    if variable == "solution" or not eq.is_euler:
        return np.ascontiguousarray(u[..., 0])
    prim = conserved_to_primitive(eq, u)
    if variable == "density":
        return np.ascontiguousarray(prim[..., 0])
    if variable == "pressure":
        return np.ascontiguousarray(prim[..., -1])
    return np.ascontiguousarray(prim[..., 0] * prim[..., -1])


def modal_shock_indicator(elem: ElementView, ops: OperatorSet,
                          config: IndicatorConfig,
                          eq: EquationDescriptor) -> float:
    """Clipped blending factor from the element's modal energy profile."""
    v = indicator_values(eq, elem.u, config.indicator_variable)[None]
    out = np.empty(1)
    kernels.modal_beta(np.ascontiguousarray(v, dtype=float), ops.Vinv,
                       elem.degree, elem.ndims,
                       indicator_threshold(elem.degree), KAPPA,
                       config.beta_min, config.beta_max, out)
    return float(out[0])


def shock_capturing_select(beta: float,
                           config: IndicatorConfig) -> SchemeChoice:
    """Map a blending factor to a scheme choice (WF/FD default at beta=0)."""
    if beta == 0.0:
        return SchemeChoice(kind=config.sc_default, beta=0.0)
    return SchemeChoice(kind="Blend", beta=beta)
