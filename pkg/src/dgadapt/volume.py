"""Per-element volume-term kernels: weak form, flux differencing, subcell FV.

The three kernels are interchangeable behind one convention: each returns
the complete volume part of the semidiscrete update (including its own
``M^{-1} B f`` boundary-node term), so the semidiscretization owns a single
``-M^{-1} B f*`` interface pass regardless of the scheme applied per element.
Contributions are in physical time units (metric factors applied).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .equations import (
    FLUX_CODES,
    ConfigurationError,
    EquationDescriptor,
    FluxKind,
)
from .operators import OperatorSet

__all__ = [
    "VolumeSchemeMode",
    "ElementView",
    "VolumeContribution",
    "weak_form_vt",
    "flux_differencing_vt",
    "subcell_fv_vt",
    "blended_vt",
    "wf_flux_evals",
    "fd_flux_evals",
]


class VolumeSchemeMode(enum.Enum):
    """Which volume-term strategy a run uses."""

    WF = "wf"
    FD = "fd"
    AdaptiveRigorous = "adaptive_rigorous"
    AdaptiveHeuristic = "adaptive_heuristic"
    BlendedShock = "blended_shock"


def wf_flux_evals(p: int, ndims: int) -> int:
    """Analytical flux evaluations of the weak form: ``d (p+1)^d``."""
    return ndims * (p + 1) ** ndims


def fd_flux_evals(p: int, ndims: int) -> int:
    """Two-point evaluations of flux differencing: ``(d p / 2) (p+1)^d``."""
    return ndims * p * (p + 1) ** ndims // 2


@dataclass(frozen=True)
class ElementView:
    """Nodal states of one element plus its metric factors ``2/dx`` per axis."""

    u: np.ndarray
    metric: tuple
    ndims: int

    def __post_init__(self):
        if any(m <= 0.0 for m in self.metric):
            raise ConfigurationError("metric factors must be positive")

    @property
    def degree(self) -> int:
        n = self.u.shape[0]
        p1 = round(n ** (1.0 / self.ndims))
        if p1 ** self.ndims != n:
            raise ConfigurationError(
                f"node count {n} is not (p+1)^{self.ndims}"
            )
        return p1 - 1


@dataclass
class VolumeContribution:
    """du/dt increment of a volume kernel plus its flux-evaluation counters."""

    rate: np.ndarray
    analytical_evals: int = 0
    two_point_evals: int = 0
    fv_evals: int = 0


_ALL = np.zeros(1, dtype=np.int64)


def _batched(elem: ElementView):
    u = np.ascontiguousarray(elem.u, dtype=float)[None]
    metric = np.asarray(elem.metric, dtype=float)
    return u, metric


def weak_form_vt(elem: ElementView, ops: OperatorSet,
                 eq: EquationDescriptor) -> VolumeContribution:
    """Weak-form volume term ``J^{-1} M^{-1} D^T M f`` per direction."""
    u, metric = _batched(elem)
    rate = np.zeros_like(u)
    n = kernels.wf_volume(eq.eq_code, eq.gamma, u, _ALL, elem.degree,
                          elem.ndims, ops.Dhat, metric, rate)
    return VolumeContribution(rate=rate[0], analytical_evals=n)


def flux_differencing_vt(elem: ElementView, ops: OperatorSet,
                         eq: EquationDescriptor,
                         volume_flux: FluxKind) -> VolumeContribution:
    """Flux-differencing volume term ``-J^{-1} (2D - M^{-1}B) f^vol``."""
    if not volume_flux.is_volume_kind:
        raise ConfigurationError(
            f"{volume_flux.name} is not a valid volume flux"
        )
    u, metric = _batched(elem)
    rate = np.zeros_like(u)
    n2p = kernels.fd_volume(eq.eq_code, eq.gamma, FLUX_CODES[volume_flux],
                            u, _ALL, elem.degree, elem.ndims, ops.D,
                            metric, None, rate)
    return VolumeContribution(rate=rate[0], two_point_evals=n2p)


def subcell_fv_vt(elem: ElementView, ops: OperatorSet, eq: EquationDescriptor,
                  surface_kind: FluxKind = FluxKind.Rusanov) -> VolumeContribution:
    """First-order finite-volume update on the quadrature-weight subcells.

    Interior subcell faces carry two-point interface fluxes between adjacent
    nodes; the outermost faces are left to the semidiscretization's interface
    term so the blend stays conservative.
    """
    if surface_kind.is_entropy_conservative:
        raise ConfigurationError("subcell FV needs a surface flux kind")
    u, metric = _batched(elem)
    rate = np.zeros_like(u)
    n = kernels.fv_volume(eq.eq_code, eq.gamma, FLUX_CODES[surface_kind],
                          u, _ALL, elem.degree, elem.ndims, ops.weights,
                          metric, None, rate)
    return VolumeContribution(rate=rate[0], fv_evals=n)


def blended_vt(elem: ElementView, ops: OperatorSet, eq: EquationDescriptor,
               volume_flux: FluxKind, surface_kind: FluxKind,
               beta: float) -> VolumeContribution:
    """Convex DG-FV blend ``(1-beta) FD + beta FV`` with cost short-circuits."""
    if not 0.0 <= beta <= 1.0:
        raise ConfigurationError(f"blending factor must be in [0, 1], got {beta}")
    if beta == 0.0:
        return flux_differencing_vt(elem, ops, eq, volume_flux)
    if beta == 1.0:
        return subcell_fv_vt(elem, ops, eq, surface_kind)
    fd = flux_differencing_vt(elem, ops, eq, volume_flux)
    fv = subcell_fv_vt(elem, ops, eq, surface_kind)
    return VolumeContribution(
        rate=(1.0 - beta) * fd.rate + beta * fv.rate,
        two_point_evals=fd.two_point_evals,
        fv_evals=fv.fv_evals,
    )
