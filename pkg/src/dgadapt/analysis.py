"""Error norms, entropy diagnostics, linearization spectra, flux-cost accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .backend import kernels
from .equations import ConfigurationError, EquationDescriptor
from .semidiscretization import (
    SemidiscretizationConfig,
    SolutionField,
    StageReport,
    compute_rhs,
    node_coords,
)
from .time_integration import AggregateCounters
from .volume import VolumeSchemeMode, fd_flux_evals, wf_flux_evals

__all__ = [
    "ErrorReport",
    "SpectrumReport",
    "CostSummary",
    "SizeError",
    "l2_linf_errors",
    "total_entropy",
    "jacobian_fd",
    "spectrum_max_real",
    "flux_cost_report",
    "convergence_orders",
    "EntropyRecorder",
    "PositivityRecorder",
    "SchemeUsageRecorder",
]


class SizeError(ValueError):
    """System dimension too large for a dense linearization."""


@dataclass
class ErrorReport:
    """Domain-normalized L2 and pointwise Linf errors per variable."""

    l2: np.ndarray
    linf: np.ndarray
    grid: tuple
    p: int
    mode: str = ""


def l2_linf_errors(state: SolutionField, u_exact: Callable,
                   config: SemidiscretizationConfig,
                   mode: str = "") -> ErrorReport:
    """Errors against ``u_exact(x, t)``; L2 is domain-normalized."""
    x = node_coords(config.mesh, config.ops)
    diff = state.data - np.asarray(u_exact(x, state.t), dtype=float)
    wbar = config.tensor_weights()
    volume = float(np.prod([hi - lo for lo, hi in config.mesh.bounds]))
    j = config.mesh.jacobian
    l2 = np.sqrt(np.einsum("j,ejv->v", wbar, diff * diff) * j / volume)
    linf = np.max(np.abs(diff), axis=(0, 1))
    return ErrorReport(l2=l2, linf=linf, grid=config.mesh.cells, p=config.p,
                       mode=mode)


def total_entropy(state, config: SemidiscretizationConfig) -> float:
    """Quadrature of the mathematical entropy over the whole mesh."""
    u = state.data if isinstance(state, SolutionField) else state
    per_elem = np.empty(config.mesh.n_elements)
    kernels.entropy_sum(config.eq.eq_code, config.eq.gamma,
                        np.ascontiguousarray(u, dtype=float),
                        config.tensor_weights(), per_elem)
    return float(config.mesh.jacobian * per_elem.sum())


def total_entropy_rate(u, rate, config: SemidiscretizationConfig) -> float:
    """Semidiscrete ``dS_total/dt``: J-weighted quadrature of ``w . udot``."""
    u = u.data if isinstance(u, SolutionField) else u
    per_elem = np.empty(config.mesh.n_elements)
    kernels.entropy_dot(config.eq.eq_code, config.eq.gamma,
                        np.ascontiguousarray(u, dtype=float),
                        np.ascontiguousarray(rate, dtype=float),
                        config.tensor_weights(), per_elem)
    return float(config.mesh.jacobian * per_elem.sum())


# -- linearization -------------------------------------------------------------

def jacobian_fd(config: SemidiscretizationConfig, state: SolutionField,
                eps_scale: float = 1e-6, max_dim: int = 5000,
                freeze_adaptive: bool = True) -> np.ndarray:
    """Dense Jacobian of the semidiscrete RHS by central finite differences.

    For the adaptive modes the per-element scheme choice is frozen at the
    evaluation state (the linearization of a branch-wise-defined scheme is
    taken on the active branch).
    """
    u0 = state.data
    dim = u0.size
    if dim > max_dim:
        raise SizeError(f"system dimension {dim} exceeds dense limit {max_dim}")
    forced = None
    if freeze_adaptive and config.volume_mode in (
            VolumeSchemeMode.AdaptiveRigorous, VolumeSchemeMode.AdaptiveHeuristic):
        record = config.record_choices
        config.record_choices = True
        _, rep = compute_rhs(u0, state.t, config)
        config.record_choices = record
        forced = rep.choices
    flat = u0.reshape(-1)
    jac = np.empty((dim, dim))
    pert = flat.copy()
    for col in range(dim):
        h = eps_scale * max(1.0, abs(flat[col]))
        pert[col] = flat[col] + h
        rp, _ = compute_rhs(pert.reshape(u0.shape), state.t, config,
                            forced_choices=forced)
        pert[col] = flat[col] - h
        rm, _ = compute_rhs(pert.reshape(u0.shape), state.t, config,
                            forced_choices=forced)
        pert[col] = flat[col]
        jac[:, col] = (rp - rm).reshape(-1) / (2.0 * h)
    return jac


@dataclass
class SpectrumReport:
    """Eigenvalues of a semidiscretization Jacobian and the stability radius."""

    eigenvalues: np.ndarray
    r: float
    dim: int
    eps_scale: float = 1e-6

    @classmethod
    def from_matrix(cls, jac: np.ndarray, eps_scale: float = 1e-6):
        lam = np.linalg.eigvals(jac)
        return cls(eigenvalues=lam, r=float(np.max(lam.real)),
                   dim=jac.shape[0], eps_scale=eps_scale)


def spectrum_max_real(jac: np.ndarray) -> SpectrumReport:
    """All eigenvalues of a dense real matrix plus the largest real part."""
    if jac.ndim != 2 or jac.shape[0] != jac.shape[1]:
        raise ConfigurationError("spectrum needs a square matrix")
    return SpectrumReport.from_matrix(jac)


# -- cost accounting -----------------------------------------------------------

@dataclass
class CostSummary:
    """Aggregated flux-evaluation counts and phase wall times."""

    n_stages: int
    analytical_evals: int
    two_point_evals: int
    fv_evals: int
    surface_evals: int
    n_wf: int
    n_fd: int
    n_blend: int
    time_surface: float
    time_volume: float

    @property
    def wf_fd_eval_ratio(self) -> float:
        """Two-point evals per analytical eval actually performed."""
        if self.analytical_evals == 0:
            return math.inf if self.two_point_evals else 0.0
        return self.two_point_evals / self.analytical_evals


def flux_cost_report(reports) -> CostSummary:
    """Summarize stage reports (an iterable of StageReport or an aggregate)."""
    if isinstance(reports, AggregateCounters):
        agg = reports
    else:
        agg = AggregateCounters()
        for rep in reports:
            agg.add(rep)
    return CostSummary(
        n_stages=agg.n_stages,
        analytical_evals=agg.analytical_evals,
        two_point_evals=agg.two_point_evals,
        fv_evals=agg.fv_evals,
        surface_evals=agg.surface_evals,
        n_wf=agg.n_wf,
        n_fd=agg.n_fd,
        n_blend=agg.n_blend,
        time_surface=agg.time_surface,
        time_volume=agg.time_volume,
    )


def convergence_orders(errors) -> np.ndarray:
    """Observed orders ``log2(e_coarse / e_fine)`` between consecutive grids.

    Assumes each refinement halves the element width.
    """
    e = np.asarray(errors, dtype=float)
    return np.log2(e[:-1] / e[1:])


# -- step callbacks --------------------------------------------------------------

class EntropyRecorder:
    """Records ``(t, S_total, S_total - S_initial)`` at every step."""

    def __init__(self, config: SemidiscretizationConfig):
        self.config = config
        self.times = []
        self.entropy = []

    def __call__(self, step, t, state, reports):
        self.times.append(t)
        self.entropy.append(total_entropy(state, self.config))

    @property
    def drift(self) -> np.ndarray:
        s = np.asarray(self.entropy)
        return s - s[0]


class PositivityRecorder:
    """Records minimum density and pressure (Euler) at every step."""

    def __init__(self, config: SemidiscretizationConfig):
        self.config = config
        self.times = []
        self.min_rho = []
        self.min_p = []

    def __call__(self, step, t, state, reports):
        self.times.append(t)
        if not self.config.eq.is_euler:
            self.min_rho.append(float(np.min(state.data[..., 0])))
            self.min_p.append(float("nan"))
            return
        u = state.data
        rho = u[..., 0]
        kin = 0.5 * np.sum(u[..., 1:-1] ** 2, axis=-1) / rho
        p = (self.config.eq.gamma - 1.0) * (u[..., -1] - kin)
        self.min_rho.append(float(rho.min()))
        self.min_p.append(float(p.min()))


class SchemeUsageRecorder:
    """Per-stage scheme-selection statistics (for the stage-report CSV)."""

    def __init__(self):
        self.rows = []  # (stage_index, n_wf, n_fd, n_blend, mean_beta, sdot)

    def __call__(self, step, t, state, reports):
        for rep in reports:
            self.rows.append((len(self.rows), rep.n_wf, rep.n_fd, rep.n_blend,
                              rep.mean_beta, rep.sdot_volume))
