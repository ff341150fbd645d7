"""Registry of benchmark problems: initial conditions, exact solutions, defaults.

Each entry carries the reference configuration (polynomial degree, grid,
fluxes, volume mode, final time, step control) so runs are reproducible from
an id alone; the CLI and the test suite both build on this registry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import equations as eqs
from .equations import EquationDescriptor, FluxKind, primitive_to_conserved
from .indicators import IndicatorConfig
from .semidiscretization import Mesh, SemidiscretizationConfig, SolutionField, project_function
from .volume import VolumeSchemeMode

__all__ = ["TestCase", "testcase", "available_testcases", "build_config",
           "initial_state"]


@dataclass(frozen=True)
class TestCase:
    """A named problem setup with registry defaults."""

    id: str
    eq: EquationDescriptor
    bounds: tuple
    periodic: tuple
    ic: Callable  # x (..., ndims) -> conserved (..., nvars)
    exact: Optional[Callable] = None  # (x, t) -> conserved
    cells: tuple = (64,)
    p: int = 3
    surface_kind: FluxKind = FluxKind.Rusanov
    volume_flux: Optional[FluxKind] = None
    volume_mode: VolumeSchemeMode = VolumeSchemeMode.FD
    fv_kind: FluxKind = FluxKind.Rusanov
    indicator: IndicatorConfig = field(default_factory=IndicatorConfig)
    t_final: float = 1.0
    cfl: Optional[float] = 0.5
    dt: Optional[float] = None
    method: str = "LSRK54_CarpenterKennedy"
    dirichlet_from_ic: bool = False
    notes: str = ""

    def mesh(self, cells=None) -> Mesh:
        return Mesh(cells=tuple(cells or self.cells), bounds=self.bounds,
                    periodic=self.periodic)


# -- initial conditions -------------------------------------------------------

def _density_wave_1d(eq):
    def exact(x, t):
        xs = x[..., 0] - 0.1 * t
        prim = np.empty(x.shape[:-1] + (3,))
        prim[..., 0] = 1.0 + 0.98 * np.sin(2.0 * np.pi * xs)
        prim[..., 1] = 0.1
        prim[..., 2] = 20.0
        return primitive_to_conserved(eq, prim)

    return exact


def _density_wave_2d(eq):
    def exact(x, t):
        xs = x[..., 0] - 0.1 * t
        ys = x[..., 1] - 0.2 * t
        prim = np.empty(x.shape[:-1] + (4,))
        prim[..., 0] = 1.0 + 0.98 * np.sin(2.0 * np.pi * (xs + ys))
        prim[..., 1] = 0.1
        prim[..., 2] = 0.2
        prim[..., 3] = 20.0
        return primitive_to_conserved(eq, prim)

    return exact


def _burgers_sine(x, t=0.0):
    return (np.sin(2.0 * np.pi * x[..., 0]) + 0.5)[..., None]


def _sod_modified(eq):
    def ic(x):
        left = x[..., 0] < 0.3
        prim = np.empty(x.shape[:-1] + (3,))
        prim[..., 0] = np.where(left, 1.0, 0.125)
        prim[..., 1] = np.where(left, 0.75, 0.0)
        prim[..., 2] = np.where(left, 1.0, 0.1)
        return primitive_to_conserved(eq, prim)

    return ic


def _kpp(x, t=0.0):
    inside = x[..., 0] ** 2 + x[..., 1] ** 2 < 1.0
    return np.where(inside, 3.5 * np.pi, 0.25 * np.pi)[..., None]


# Isentropic vortex constants (strength, radius, Mach, base flow); the vortex
# is advected diagonally once through the periodic box.
VORTEX_STRENGTH = 13.5
VORTEX_RADIUS = 1.5
VORTEX_MACH = 0.4
VORTEX_VELOCITY = (1.0, 1.0)
VORTEX_EDGE = 20.0


def _vortex(eq):
    gamma = eq.gamma
    edge = VORTEX_EDGE

    def exact(x, t):
        dx = x[..., 0] - VORTEX_VELOCITY[0] * t
        dy = x[..., 1] - VORTEX_VELOCITY[1] * t
        # wrap the advected center back into the periodic box
        dx = (dx + edge / 2.0) % edge - edge / 2.0
        dy = (dy + edge / 2.0) % edge - edge / 2.0
        r2 = dx * dx + dy * dy
        f = (1.0 - r2) / (2.0 * VORTEX_RADIUS ** 2)
        expf = np.exp(f)
        rho = (1.0 - (VORTEX_STRENGTH * VORTEX_MACH / math.pi) ** 2
               * (gamma - 1.0) * expf ** 2 / 8.0) ** (1.0 / (gamma - 1.0))
        du = VORTEX_STRENGTH / (2.0 * math.pi * VORTEX_RADIUS) * expf
        prim = np.empty(x.shape[:-1] + (4,))
        prim[..., 0] = rho
        prim[..., 1] = VORTEX_VELOCITY[0] + du * dy
        prim[..., 2] = VORTEX_VELOCITY[1] - du * dx
        prim[..., 3] = rho ** gamma / (gamma * VORTEX_MACH ** 2)
        return primitive_to_conserved(eq, prim)

    return exact


def _khi(eq):
    def ic(x):
        b = np.tanh(15.0 * x[..., 1] + 7.5) - np.tanh(15.0 * x[..., 1] - 7.5)
        prim = np.empty(x.shape[:-1] + (4,))
        prim[..., 0] = 0.5 + 0.75 * b
        prim[..., 1] = 0.5 * (b - 1.0)
        prim[..., 2] = 0.1 * np.sin(2.0 * np.pi * x[..., 0])
        prim[..., 3] = 1.0
        return primitive_to_conserved(eq, prim)

    return ic


def _registry():
    cases = {}

    eq = eqs.equation("euler1d")
    exact = _density_wave_1d(eq)
    cases["density_wave_1d"] = TestCase(
        id="density_wave_1d", eq=eq, bounds=((-1.0, 1.0),), periodic=(True,),
        ic=lambda x: exact(x, 0.0), exact=exact, cells=(64,), p=3,
        surface_kind=FluxKind.EC_Ranocha, volume_flux=FluxKind.EC_Ranocha,
        volume_mode=VolumeSchemeMode.AdaptiveRigorous, t_final=2.0, cfl=0.5,
        notes="Euler reduces to linear density advection; EC surface flux.")

    eq2 = eqs.equation("euler2d")
    exact2 = _density_wave_2d(eq2)
    cases["density_wave_2d"] = TestCase(
        id="density_wave_2d", eq=eq2,
        bounds=((-1.0, 1.0), (-1.0, 1.0)), periodic=(True, True),
        ic=lambda x: exact2(x, 0.0), exact=exact2, cells=(4, 4), p=5,
        surface_kind=FluxKind.Rusanov, volume_flux=FluxKind.EC_Chandrashekar,
        volume_mode=VolumeSchemeMode.FD, t_final=5.0, cfl=0.45,
        notes="linear-stability study configuration (4x4, p=5, LLF).")

    eqb = eqs.equation("burgers1d")
    cases["burgers_sine"] = TestCase(
        id="burgers_sine", eq=eqb, bounds=((0.0, 1.0),), periodic=(True,),
        ic=_burgers_sine, cells=(64,), p=3,
        surface_kind=FluxKind.GodunovBurgers, volume_flux=FluxKind.EC_Burgers,
        volume_mode=VolumeSchemeMode.AdaptiveRigorous, t_final=0.25, cfl=0.5,
        method="SSPRK54_Ruuth",
        notes="shock forms at t = 1/(2 pi) and travels with speed 0.5.")

    eqs1 = eqs.equation("euler1d")
    cases["sod_modified"] = TestCase(
        id="sod_modified", eq=eqs1, bounds=((0.0, 1.0),), periodic=(False,),
        ic=_sod_modified(eqs1), cells=(64,), p=3,
        surface_kind=FluxKind.HLLC, volume_flux=FluxKind.EC_Ranocha,
        volume_mode=VolumeSchemeMode.AdaptiveRigorous, t_final=0.2, cfl=0.5,
        method="SSPRK54_Ruuth", dirichlet_from_ic=True,
        notes="modified Sod tube; jump at x=0.3, left state moves right.")

    eqk = eqs.equation("kpp2d")
    cases["kpp"] = TestCase(
        id="kpp", eq=eqk, bounds=((-2.0, 2.0), (-2.0, 2.0)),
        periodic=(True, True), ic=_kpp, cells=(128, 128), p=4,
        surface_kind=FluxKind.Rusanov, volume_flux=FluxKind.EC_KPP,
        volume_mode=VolumeSchemeMode.BlendedShock, fv_kind=FluxKind.Rusanov,
        indicator=IndicatorConfig(indicator_variable="solution",
                                  beta_min=0.001, beta_max=0.5,
                                  sc_default="WF", smooth_beta=True),
        t_final=1.0, cfl=None, dt=1e-3, method="SSPRK54_Ruuth",
        notes="non-convex scalar 2D problem on a uniform grid.")

    eqv = eqs.equation("euler2d")
    vortex_exact = _vortex(eqv)
    half = VORTEX_EDGE / 2.0
    cases["isentropic_vortex_2d"] = TestCase(
        id="isentropic_vortex_2d", eq=eqv,
        bounds=((-half, half), (-half, half)), periodic=(True, True),
        ic=lambda x: vortex_exact(x, 0.0), exact=vortex_exact,
        cells=(32, 32), p=3, surface_kind=FluxKind.HLLC,
        volume_flux=FluxKind.EC_Ranocha,
        volume_mode=VolumeSchemeMode.AdaptiveRigorous,
        t_final=VORTEX_EDGE / VORTEX_VELOCITY[0], cfl=0.3,
        notes="single diagonal pass through the periodic box.")

    eqh = eqs.equation("euler2d")
    cases["khi_2d"] = TestCase(
        id="khi_2d", eq=eqh, bounds=((-1.0, 1.0), (-1.0, 1.0)),
        periodic=(True, True), ic=_khi(eqh), cells=(32, 32), p=3,
        surface_kind=FluxKind.HLLC, volume_flux=FluxKind.EC_Ranocha,
        volume_mode=VolumeSchemeMode.AdaptiveRigorous, t_final=6.0, cfl=0.3,
        notes="shear-layer roll-up; runs are compared by survival time.")

    return cases


_CASES = _registry()


def available_testcases():
    return sorted(_CASES)


def testcase(id: str) -> TestCase:
    if id not in _CASES:
        raise KeyError(
            f"unknown testcase {id!r}; available: {available_testcases()}"
        )
    return _CASES[id]


def build_config(tc: TestCase, cells=None, p=None, surface_kind=None,
                 volume_flux=None, volume_mode=None, fv_kind=None,
                 indicator=None, threads=1, record_choices=False):
    """SemidiscretizationConfig from registry defaults plus overrides."""
    mesh = tc.mesh(cells)
    dirichlet = None
    if tc.dirichlet_from_ic and not all(mesh.periodic):
        dirichlet = lambda x, t: tc.ic(x)
    return SemidiscretizationConfig(
        eq=tc.eq,
        mesh=mesh,
        p=tc.p if p is None else p,
        surface_kind=tc.surface_kind if surface_kind is None else surface_kind,
        volume_mode=tc.volume_mode if volume_mode is None else volume_mode,
        volume_flux=tc.volume_flux if volume_flux is None else volume_flux,
        fv_kind=tc.fv_kind if fv_kind is None else fv_kind,
        indicator=tc.indicator if indicator is None else indicator,
        dirichlet=dirichlet,
        threads=threads,
        record_choices=record_choices,
    )


def initial_state(tc: TestCase, config: SemidiscretizationConfig) -> SolutionField:
    return project_function(tc.ic, config.mesh, config.ops, config.eq, t=0.0)
