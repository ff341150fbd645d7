"""Explicit Runge-Kutta drivers with CFL-based or fixed timesteps.

Two five-stage fourth-order integrators are provided: the low-storage 2N
scheme of Carpenter and Kennedy and the strong-stability-preserving scheme
of Ruuth (Shu-Osher form).  Coefficients come from the original references
and are validated by observed-order tests rather than transcription trust.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .backend import kernels
from .equations import AdmissibilityError, ConfigurationError, EquationDescriptor
from .semidiscretization import (
    DivergenceError,
    Mesh,
    SemidiscretizationConfig,
    SolutionField,
    StageReport,
    compute_rhs,
)

__all__ = [
    "RKMethod",
    "LSRK54_CARPENTER_KENNEDY",
    "SSPRK54_RUUTH",
    "rk_method",
    "StepController",
    "cfl_timestep",
    "rk_step",
    "integrate",
    "IntegrationResult",
]


@dataclass(frozen=True)
class RKMethod:
    """A five-stage fourth-order explicit Runge-Kutta method."""

    id: str
    kind: str  # 'lsrk2n' | 'shuosher'
    order: int = 4


LSRK54_CARPENTER_KENNEDY = RKMethod(id="LSRK54_CarpenterKennedy", kind="lsrk2n")
SSPRK54_RUUTH = RKMethod(id="SSPRK54_Ruuth", kind="shuosher")

_METHODS = {m.id: m for m in (LSRK54_CARPENTER_KENNEDY, SSPRK54_RUUTH)}

# Carpenter-Kennedy (1994) five-stage low-storage coefficients
_LSRK_A = np.array([
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
])
_LSRK_B = np.array([
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
])
_LSRK_C = np.array([
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
])

# Ruuth (2006) optimal five-stage fourth-order SSP coefficients, Shu-Osher form
_SSP_B1 = 0.391752226571890
_SSP_A20, _SSP_A21, _SSP_B2 = 0.444370493651235, 0.555629506348765, 0.368410593050371
_SSP_A30, _SSP_A32, _SSP_B3 = 0.620101851488403, 0.379898148511597, 0.251891774271694
_SSP_A40, _SSP_A43, _SSP_B4 = 0.178079954393132, 0.821920045606868, 0.544974750228521
_SSP_A52, _SSP_A53, _SSP_B53 = 0.517231671970585, 0.096059710526147, 0.063692468666290
_SSP_A54, _SSP_B5 = 0.386708617503269, 0.226007483236906

_SSP_C1 = 0.0
_SSP_C2 = _SSP_B1
_SSP_C3 = _SSP_A21 * _SSP_C2 + _SSP_B2
_SSP_C4 = _SSP_A32 * _SSP_C3 + _SSP_B3
_SSP_C5 = _SSP_A43 * _SSP_C4 + _SSP_B4


def rk_method(id: str) -> RKMethod:
    if id not in _METHODS:
        raise ConfigurationError(
            f"unknown RK method {id!r}; available: {sorted(_METHODS)}"
        )
    return _METHODS[id]


@dataclass(frozen=True)
class StepController:
    """Timestep policy: CFL number or fixed step, final time, step cap."""

    t_final: float
    cfl: Optional[float] = None
    dt: Optional[float] = None
    max_steps: int = 10_000_000

    def __post_init__(self):
        if (self.cfl is None) == (self.dt is None):
            raise ConfigurationError("specify exactly one of cfl= or dt=")
        value = self.cfl if self.cfl is not None else self.dt
        if not value > 0.0:
            raise ConfigurationError("cfl / dt must be positive")


def cfl_timestep(u, mesh: Mesh, eq: EquationDescriptor, p: int,
                 nu: float) -> float:
    """``dt = nu / (p+1) * min over elements, nodes and directions dx/lambda``.

    Returns ``inf`` when no wave speed is positive (the caller caps the step
    at the remaining time).
    """
    if not nu > 0.0:
        raise ConfigurationError("CFL number must be positive")
    data = u.data if isinstance(u, SolutionField) else u
    ratio = kernels.min_dx_over_lambda(eq.eq_code, eq.gamma,
                                       np.ascontiguousarray(data, dtype=float),
                                       mesh.dx)
    return nu / (p + 1) * ratio


def rk_step(method: RKMethod, rhs: Callable, u: np.ndarray, t: float,
            dt: float):
    """Advance one step; ``rhs(u, t) -> (rate, report)``.

    Returns ``(u_new, stage_reports)``; ``u`` itself is not modified.
    """
    reports = []

    def f(state, stage_t):
        rate, rep = rhs(state, stage_t)
        reports.append(rep)
        return rate

    if method.kind == "lsrk2n":
        unew = u.copy()
        du = None
        for a, b, c in zip(_LSRK_A, _LSRK_B, _LSRK_C):
            rate = f(unew, t + c * dt)
            if du is None:
                du = dt * rate
            else:
                du *= a
                du += dt * rate
            unew += b * du
        return unew, reports

    if method.kind == "shuosher":
        k = f(u, t + _SSP_C1 * dt)
        u1 = u + (_SSP_B1 * dt) * k
        k = f(u1, t + _SSP_C2 * dt)
        u2 = _SSP_A20 * u + _SSP_A21 * u1 + (_SSP_B2 * dt) * k
        k = f(u2, t + _SSP_C3 * dt)
        u3 = _SSP_A30 * u + _SSP_A32 * u2 + (_SSP_B3 * dt) * k
        k3 = f(u3, t + _SSP_C4 * dt)
        u4 = _SSP_A40 * u + _SSP_A43 * u3 + (_SSP_B4 * dt) * k3
        k4 = f(u4, t + _SSP_C5 * dt)
        unew = (_SSP_A52 * u2 + _SSP_A53 * u3 + (_SSP_B53 * dt) * k3
                + _SSP_A54 * u4 + (_SSP_B5 * dt) * k4)
        return unew, reports

    raise ConfigurationError(f"unknown RK kind {method.kind}")


@dataclass
class AggregateCounters:
    """Run-level accumulation of StageReport counters and timings."""

    n_stages: int = 0
    analytical_evals: int = 0
    two_point_evals: int = 0
    fv_evals: int = 0
    surface_evals: int = 0
    n_wf: int = 0
    n_fd: int = 0
    n_blend: int = 0
    time_surface: float = 0.0
    time_volume: float = 0.0
    max_entropy_violation: float = float("-inf")

    def add(self, rep: StageReport):
        self.n_stages += 1
        self.analytical_evals += rep.analytical_evals
        self.two_point_evals += rep.two_point_evals
        self.fv_evals += rep.fv_evals
        self.surface_evals += rep.surface_evals
        self.n_wf += rep.n_wf
        self.n_fd += rep.n_fd
        self.n_blend += rep.n_blend
        self.time_surface += rep.time_surface
        self.time_volume += rep.time_volume
        self.max_entropy_violation = max(self.max_entropy_violation,
                                         rep.max_entropy_violation)


@dataclass
class IntegrationResult:
    """Outcome of :func:`integrate`."""

    state: SolutionField
    status: str  # 'completed' | 'diverged' | 'max_steps'
    n_steps: int
    counters: AggregateCounters
    t_crash: Optional[float] = None
    message: str = ""
    wall_time: float = 0.0

    @property
    def completed(self) -> bool:
        return self.status == "completed"


def integrate(state0: SolutionField, config: SemidiscretizationConfig,
              method: RKMethod, controller: StepController,
              callbacks: Iterable[Callable] = (),
              blowup_factor: float = 1e8,
              envelope_factor: Optional[float] = 5.0) -> IntegrationResult:
    """March the semidiscretization to ``t_final`` with per-step callbacks.

    Callbacks are invoked as ``cb(step, t, state, stage_reports)`` after every
    accepted step (and once at the initial time with ``step=0``).  Divergence
    (non-admissible state, non-finite values, or growth of the state norm by
    ``blowup_factor``) terminates with the crash time recorded.

    For scalar conservation laws the exact solution obeys the maximum
    principle ``max|u(t)| <= max|u(0)|``; a numerical solution exceeding that
    envelope by ``envelope_factor`` has broken down even if it stays finite,
    and is likewise reported as diverged (pass ``None`` to disable).
    """
    u = state0.data.copy()
    t = float(state0.t)
    counters = AggregateCounters()
    u0_max = float(np.max(np.abs(u)))
    guard = blowup_factor * max(1.0, u0_max)
    if envelope_factor is not None and config.eq.nvars == 1:
        guard = min(guard, envelope_factor * u0_max)
    wall_start = time.perf_counter()

    def rhs(state, stage_t):
        return compute_rhs(state, stage_t, config)

    for cb in callbacks:
        cb(0, t, SolutionField(u, t), [])

    step = 0
    status = "completed"
    message = ""
    t_crash = None
    while t < controller.t_final - 1e-14 * max(1.0, abs(controller.t_final)):
        if step >= controller.max_steps:
            status = "max_steps"
            message = f"step limit {controller.max_steps} reached at t={t:.6g}"
            break
        try:
            if controller.cfl is not None:
                dt = cfl_timestep(u, config.mesh, config.eq, config.p,
                                  controller.cfl)
            else:
                dt = controller.dt
            dt = min(dt, controller.t_final - t)
            if not math.isfinite(dt) or dt <= 0.0:
                raise DivergenceError(f"invalid timestep dt={dt}", t=t)
            unew, reports = rk_step(method, rhs, u, t, dt)
        except (AdmissibilityError, DivergenceError) as exc:
            status = "diverged"
            t_crash = t
            message = f"{type(exc).__name__}: {exc}"
            break
        for rep in reports:
            counters.add(rep)
        if not np.all(np.isfinite(unew)) or np.max(np.abs(unew)) > guard:
            status = "diverged"
            t_crash = t + dt
            message = "state norm blew up" if np.all(np.isfinite(unew)) \
                else "non-finite state"
            u = unew
            break
        u = unew
        t += dt
        step += 1
        field = SolutionField(u, t)
        for cb in callbacks:
            cb(step, t, field, reports)

    return IntegrationResult(
        state=SolutionField(u, t),
        status=status,
        n_steps=step,
        counters=counters,
        t_crash=t_crash,
        message=message,
        wall_time=time.perf_counter() - wall_start,
    )
