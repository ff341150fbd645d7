"""Method-of-lines right-hand side on uniform Cartesian meshes.

``compute_rhs`` runs three phases per evaluation:

1. interface pass: every face flux is computed exactly once and stored, so
   that the volume-scheme choice never perturbs the surface coupling;
2. volume pass: per-element dispatch between weak form, flux differencing,
   and the DG-FV blend, driven by the configured indicator;
3. surface/source application: the shared ``-J^{-1} M^{-1} B f*`` term and
   optional source terms.

The per-stage bookkeeping (scheme choices, entropy productions, flux-eval
counters, phase wall times) is returned as a :class:`StageReport`.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import equations as eqs
from .backend import kernels
from .equations import (
    FLUX_CODES,
    AdmissibilityError,
    ConfigurationError,
    EquationDescriptor,
    FluxKind,
)
from .indicators import KAPPA, IndicatorConfig, indicator_threshold, indicator_values
from .operators import OperatorSet, build_operators
from .volume import VolumeSchemeMode, fd_flux_evals, wf_flux_evals

__all__ = [
    "DivergenceError",
    "Mesh",
    "SolutionField",
    "SemidiscretizationConfig",
    "StageReport",
    "compute_rhs",
    "apply_boundary",
    "evaluate_source",
    "project_function",
    "save_snapshot",
    "load_snapshot",
]

CHOICE_WF, CHOICE_FD, CHOICE_BLEND = 0, 1, 2


class DivergenceError(RuntimeError):
    """The semidiscrete rate (or state) stopped being finite."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class Mesh:
    """Uniform Cartesian mesh; per-direction cell counts and periodicity."""

    cells: tuple
    bounds: tuple
    periodic: tuple

    def __post_init__(self):
        if not (len(self.cells) == len(self.bounds) == len(self.periodic)):
            raise ConfigurationError("inconsistent mesh dimensions")
        for (lo, hi), n in zip(self.bounds, self.cells):
            if hi <= lo or n < 1:
                raise ConfigurationError("invalid mesh bounds or cell count")

    @property
    def ndims(self) -> int:
        return len(self.cells)

    @property
    def n_elements(self) -> int:
        return int(np.prod(self.cells))

    @property
    def dx(self) -> np.ndarray:
        return np.array([(hi - lo) / n
                         for (lo, hi), n in zip(self.bounds, self.cells)])

    @property
    def jacobian(self) -> float:
        """Affine-mapping Jacobian, identical for all elements."""
        return float(np.prod(self.dx / 2.0))

    @property
    def metric(self) -> np.ndarray:
        return 2.0 / self.dx


def make_mesh_1d(n, lo=-1.0, hi=1.0, periodic=True) -> Mesh:
    return Mesh(cells=(n,), bounds=((lo, hi),), periodic=(periodic,))


def make_mesh_2d(nx, ny, bounds, periodic=(True, True)) -> Mesh:
    return Mesh(cells=(nx, ny), bounds=tuple(bounds), periodic=tuple(periodic))


def node_coords(mesh: Mesh, ops: OperatorSet) -> np.ndarray:
    """Physical node coordinates, shaped ``(nelem, nnodes, ndims)``."""
    xi = ops.nodes
    p1 = xi.size
    axes = []
    for (lo, _), n, dx in zip(mesh.bounds, mesh.cells, mesh.dx):
        centers = lo + dx * (np.arange(n) + 0.5)
        axes.append(centers[:, None] + 0.5 * dx * xi[None, :])
    if mesh.ndims == 1:
        return axes[0][:, :, None]
    nx, ny = mesh.cells
    x = axes[0]  # (nx, p1)
    y = axes[1]  # (ny, p1)
    out = np.empty((ny, nx, p1, p1, 2))
    out[..., 0] = x[None, :, None, :]
    out[..., 1] = y[:, None, :, None]
    return out.reshape(nx * ny, p1 * p1, 2)


@dataclass
class SolutionField:
    """Nodal conserved values, laid out ``(element, node, variable)``."""

    data: np.ndarray
    t: float = 0.0

    def copy(self) -> "SolutionField":
        return SolutionField(data=self.data.copy(), t=self.t)


def project_function(fn, mesh: Mesh, ops: OperatorSet, eq: EquationDescriptor,
                     t: float = 0.0) -> SolutionField:
    """Collocate ``fn(x) -> conserved`` at the mesh nodes."""
    x = node_coords(mesh, ops)
    data = np.ascontiguousarray(fn(x), dtype=float)
    if data.shape != (mesh.n_elements, x.shape[1], eq.nvars):
        raise ConfigurationError(
            f"initial condition returned shape {data.shape}"
        )
    return SolutionField(data=data, t=t)


@dataclass
class SemidiscretizationConfig:
    """Everything :func:`compute_rhs` needs besides the state itself."""

    eq: EquationDescriptor
    mesh: Mesh
    p: int
    surface_kind: FluxKind
    volume_mode: VolumeSchemeMode = VolumeSchemeMode.FD
    volume_flux: Optional[FluxKind] = None
    fv_kind: FluxKind = FluxKind.Rusanov
    indicator: IndicatorConfig = field(default_factory=IndicatorConfig)
    dirichlet: Optional[Callable] = None  # u_bc(x, t) -> conserved
    source: Optional[Callable] = None  # s(x, t, u) -> rate increment
    threads: int = 1
    record_choices: bool = False
    check_finite: bool = True
    ops: OperatorSet = None

    def __post_init__(self):
        if self.ops is None or self.ops.degree != self.p:
            self.ops = build_operators(self.p)
        if self.volume_flux is None and self.volume_mode is not VolumeSchemeMode.WF:
            raise ConfigurationError(
                f"volume_mode {self.volume_mode.value} needs a volume_flux"
            )
        if self.volume_flux is not None and not self.volume_flux.is_volume_kind:
            raise ConfigurationError(
                f"{self.volume_flux.name} is not a valid volume flux"
            )
        if self.fv_kind.is_entropy_conservative:
            raise ConfigurationError("fv_kind must be a surface flux kind")
        if not all(self.mesh.periodic) and self.dirichlet is None:
            raise ConfigurationError(
                "non-periodic mesh needs a Dirichlet boundary function"
            )
        if self.eq.ndims != self.mesh.ndims:
            raise ConfigurationError("equation/mesh dimension mismatch")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")

    @property
    def nnodes(self) -> int:
        return (self.p + 1) ** self.mesh.ndims

    def tensor_weights(self) -> np.ndarray:
        w = self.ops.weights
        return w if self.mesh.ndims == 1 else np.kron(w, w)


@dataclass
class StageReport:
    """Per-RHS-evaluation record of choices, entropy and cost."""

    t: float = 0.0
    n_elements: int = 0
    n_wf: int = 0
    n_fd: int = 0
    n_blend: int = 0
    mean_beta: float = 0.0
    analytical_evals: int = 0
    two_point_evals: int = 0
    fv_evals: int = 0
    surface_evals: int = 0
    sdot_volume: float = 0.0  # physical total entropy rate of the volume terms
    max_entropy_violation: float = float("-inf")
    time_surface: float = 0.0
    time_indicator: float = 0.0
    time_volume: float = 0.0
    choices: Optional[np.ndarray] = None
    s_wf: Optional[np.ndarray] = None
    s_fd: Optional[np.ndarray] = None
    beta: Optional[np.ndarray] = None


# -- boundary handling --------------------------------------------------------

def apply_boundary(u: np.ndarray, config: SemidiscretizationConfig,
                   direction: int, side: int, t: float) -> np.ndarray:
    """Exterior trace states for one boundary face of the mesh.

    ``side`` 0 is the low end, 1 the high end of ``direction``.  Periodic
    faces wrap to the opposite boundary trace; Dirichlet faces evaluate the
    prescribed state function at the face nodes (weak imposition: the value
    feeds the Riemann solver, it is not injected).
    """
    mesh, ops, p = config.mesh, config.ops, config.p
    p1 = p + 1
    nv = config.eq.nvars
    if mesh.ndims == 1:
        n = mesh.cells[0]
        u3 = u.reshape(n, p1, nv)
        if mesh.periodic[0]:
            return u3[-1 if side == 0 else 0, [p if side == 0 else 0]]
        lo, hi = mesh.bounds[0]
        x = np.array([[lo if side == 0 else hi]])
        return np.asarray(config.dirichlet(x[..., None], t), dtype=float)[0]
    nx, ny = mesh.cells
    u5 = u.reshape(ny, nx, p1, p1, nv)
    if mesh.periodic[direction]:
        if direction == 0:
            return u5[:, -1, :, p, :] if side == 0 else u5[:, 0, :, 0, :]
        return u5[-1, :, p, :, :] if side == 0 else u5[0, :, 0, :, :]
    xi = ops.nodes
    if direction == 0:
        (lo, hi) = mesh.bounds[0]
        xb = lo if side == 0 else hi
        ylo, _ = mesh.bounds[1]
        dy = mesh.dx[1]
        yc = ylo + dy * (np.arange(ny) + 0.5)
        coords = np.empty((ny, p1, 2))
        coords[..., 0] = xb
        coords[..., 1] = yc[:, None] + 0.5 * dy * xi[None, :]
    else:
        (lo, hi) = mesh.bounds[1]
        yb = lo if side == 0 else hi
        xlo, _ = mesh.bounds[0]
        dxx = mesh.dx[0]
        xc = xlo + dxx * (np.arange(nx) + 0.5)
        coords = np.empty((nx, p1, 2))
        coords[..., 0] = xc[:, None] + 0.5 * dxx * xi[None, :]
        coords[..., 1] = yb
    return np.asarray(config.dirichlet(coords, t), dtype=float)


def _surface_flux_pairs(config, ul, ur, direction):
    nv = config.eq.nvars
    shape = ul.shape
    out = np.empty_like(ul)
    n = kernels.surface_flux_batch(
        config.eq.eq_code, config.eq.gamma, FLUX_CODES[config.surface_kind],
        np.ascontiguousarray(ul.reshape(-1, nv)),
        np.ascontiguousarray(ur.reshape(-1, nv)),
        direction, out.reshape(-1, nv))
    return out.reshape(shape), n


def _surface_pass(u, t, config):
    """Compute and store every interface flux once; returns per-direction data."""
    mesh, p = config.mesh, config.p
    p1 = p + 1
    nv = config.eq.nvars
    fstars = []
    nevals = 0
    if mesh.ndims == 1:
        n = mesh.cells[0]
        u3 = u.reshape(n, p1, nv)
        right = u3[:, p, :]
        left = u3[:, 0, :]
        if mesh.periodic[0]:
            ul = right
            ur = np.roll(left, -1, axis=0)
            fst, ne = _surface_flux_pairs(config, ul[:, None, :], ur[:, None, :], 0)
            fstars.append(fst[:, 0, :])
            nevals += ne
        else:
            ghost_lo = apply_boundary(u, config, 0, 0, t)
            ghost_hi = apply_boundary(u, config, 0, 1, t)
            ul = np.concatenate([ghost_lo.reshape(1, nv), right], axis=0)
            ur = np.concatenate([left, ghost_hi.reshape(1, nv)], axis=0)
            fst, ne = _surface_flux_pairs(config, ul[:, None, :], ur[:, None, :], 0)
            fstars.append(fst[:, 0, :])
            nevals += ne
        return fstars, nevals
    nx, ny = mesh.cells
    u5 = u.reshape(ny, nx, p1, p1, nv)
    # x-direction faces
    right = u5[:, :, :, p, :]
    left = u5[:, :, :, 0, :]
    if mesh.periodic[0]:
        ul = right
        ur = np.roll(left, -1, axis=1)
    else:
        ghost_lo = apply_boundary(u, config, 0, 0, t)  # (ny, p1, nv)
        ghost_hi = apply_boundary(u, config, 0, 1, t)
        ul = np.concatenate([ghost_lo[:, None], right], axis=1)
        ur = np.concatenate([left, ghost_hi[:, None]], axis=1)
    fst, ne = _surface_flux_pairs(config, ul, ur, 0)
    fstars.append(fst)
    nevals += ne
    # y-direction faces
    top = u5[:, :, p, :, :]
    bottom = u5[:, :, 0, :, :]
    if mesh.periodic[1]:
        ul = top
        ur = np.roll(bottom, -1, axis=0)
    else:
        ghost_lo = apply_boundary(u, config, 1, 0, t)  # (nx, p1, nv)
        ghost_hi = apply_boundary(u, config, 1, 1, t)
        ul = np.concatenate([ghost_lo[None], top], axis=0)
        ur = np.concatenate([bottom, ghost_hi[None]], axis=0)
    fst, ne = _surface_flux_pairs(config, ul, ur, 1)
    fstars.append(fst)
    nevals += ne
    return fstars, nevals


def _apply_surface(rate, fstars, config):
    """Add the ``-J^{-1} M^{-1} B f*`` interface term for all elements."""
    mesh, p = config.mesh, config.p
    p1 = p + 1
    nv = config.eq.nvars
    w = config.ops.weights
    metric = mesh.metric
    if mesh.ndims == 1:
        n = mesh.cells[0]
        r3 = rate.reshape(n, p1, nv)
        fst = fstars[0]
        if mesh.periodic[0]:
            r3[:, p, :] -= (metric[0] / w[p]) * fst
            r3[:, 0, :] += (metric[0] / w[0]) * np.roll(fst, 1, axis=0)
        else:
            r3[:, p, :] -= (metric[0] / w[p]) * fst[1:]
            r3[:, 0, :] += (metric[0] / w[0]) * fst[:-1]
        return
    nx, ny = mesh.cells
    r5 = rate.reshape(ny, nx, p1, p1, nv)
    fx = fstars[0]
    if mesh.periodic[0]:
        r5[:, :, :, p, :] -= (metric[0] / w[p]) * fx
        r5[:, :, :, 0, :] += (metric[0] / w[0]) * np.roll(fx, 1, axis=1)
    else:
        r5[:, :, :, p, :] -= (metric[0] / w[p]) * fx[:, 1:]
        r5[:, :, :, 0, :] += (metric[0] / w[0]) * fx[:, :-1]
    fy = fstars[1]
    if mesh.periodic[1]:
        r5[:, :, p, :, :] -= (metric[1] / w[p]) * fy
        r5[:, :, 0, :, :] += (metric[1] / w[0]) * np.roll(fy, 1, axis=0)
    else:
        r5[:, :, p, :, :] -= (metric[1] / w[p]) * fy[1:]
        r5[:, :, 0, :, :] += (metric[1] / w[0]) * fy[:-1]


def evaluate_source(u: np.ndarray, t: float, config: SemidiscretizationConfig,
                    rate: np.ndarray) -> None:
    """Pointwise source-term addition (no-op when no source is configured)."""
    if config.source is None:
        return
    x = node_coords(config.mesh, config.ops)
    rate += config.source(x, t, u)


# -- volume pass ---------------------------------------------------------------

def _chunks(idx: np.ndarray, nthreads: int):
    if nthreads <= 1 or idx.size < 2 * nthreads:
        return [idx]
    return np.array_split(idx, nthreads)


def _run_volume(fn, idx, config, args, accumulate):
    """Run a volume kernel over element chunks, possibly on a thread pool."""
    parts = _chunks(idx, config.threads)
    if len(parts) == 1:
        accumulate(fn(parts[0], *args))
        return
    with ThreadPoolExecutor(max_workers=len(parts)) as pool:
        futures = [pool.submit(fn, part, *args) for part in parts]
        for fut in futures:
            accumulate(fut.result())


def compute_rhs(state, t, config: SemidiscretizationConfig,
                forced_choices: Optional[np.ndarray] = None):
    """Assemble the full semidiscrete rate; returns ``(rate, StageReport)``.

    ``forced_choices`` freezes the per-element scheme selection (an int8
    array of CHOICE_* codes), used to linearize the adaptive schemes with
    the indicator branch held fixed.
    """
    u = state.data if isinstance(state, SolutionField) else state
    u = np.ascontiguousarray(u, dtype=float)
    eq, mesh, ops, p = config.eq, config.mesh, config.ops, config.p
    ne = mesh.n_elements
    nnodes = config.nnodes
    if u.shape != (ne, nnodes, eq.nvars):
        raise ConfigurationError(f"state shape {u.shape} does not match config")
    report = StageReport(t=t, n_elements=ne)
    rate = np.zeros_like(u)
    metric = mesh.metric
    wbar = config.tensor_weights()
    all_idx = np.arange(ne, dtype=np.int64)

    tic = time.perf_counter()
    fstars, nsurf = _surface_pass(u, t, config)
    report.surface_evals = nsurf
    report.time_surface = time.perf_counter() - tic

    def run_wf(idx):
        def call(part):
            return kernels.wf_volume(eq.eq_code, eq.gamma, u, part, p,
                                     mesh.ndims, ops.Dhat, metric, rate)
        _run_volume(lambda part: call(part), idx, config, (),
                    lambda n: _count(report, analytical=n))

    def run_fd(idx, scale=None):
        flux_code = FLUX_CODES[config.volume_flux]
        def call(part, sc):
            return kernels.fd_volume(eq.eq_code, eq.gamma, flux_code, u, part,
                                     p, mesh.ndims, ops.D, metric, sc, rate)
        parts = _chunks(idx, config.threads)
        offsets = np.cumsum([0] + [part.size for part in parts])
        scales = [None if scale is None else scale[offsets[i]:offsets[i + 1]]
                  for i in range(len(parts))]
        if len(parts) == 1:
            res = [call(parts[0], scales[0])]
        else:
            with ThreadPoolExecutor(max_workers=len(parts)) as pool:
                futs = [pool.submit(call, part, sc)
                        for part, sc in zip(parts, scales)]
                res = [f.result() for f in futs]
        for n2p in res:
            _count(report, two_point=n2p)

    def run_fv(idx, scale):
        flux_code = FLUX_CODES[config.fv_kind]
        parts = _chunks(idx, config.threads)
        offsets = np.cumsum([0] + [part.size for part in parts])
        scales = [scale[offsets[i]:offsets[i + 1]] for i in range(len(parts))]
        def call(part, sc):
            return kernels.fv_volume(eq.eq_code, eq.gamma, flux_code, u, part,
                                     p, mesh.ndims, ops.weights, metric, sc,
                                     rate)
        if len(parts) == 1:
            res = [call(parts[0], scales[0])]
        else:
            with ThreadPoolExecutor(max_workers=len(parts)) as pool:
                futs = [pool.submit(call, part, sc)
                        for part, sc in zip(parts, scales)]
                res = [f.result() for f in futs]
        for n in res:
            _count(report, fv=n)

    mode = config.volume_mode
    tic = time.perf_counter()
    if forced_choices is not None and mode in (
            VolumeSchemeMode.AdaptiveRigorous, VolumeSchemeMode.AdaptiveHeuristic):
        wf_idx = all_idx[forced_choices == CHOICE_WF]
        fd_idx = all_idx[forced_choices == CHOICE_FD]
        if wf_idx.size:
            run_wf(wf_idx)
        if fd_idx.size:
            run_fd(fd_idx)
        report.n_wf, report.n_fd = wf_idx.size, fd_idx.size
    elif mode is VolumeSchemeMode.WF:
        run_wf(all_idx)
        report.n_wf = ne
    elif mode is VolumeSchemeMode.FD:
        run_fd(all_idx)
        report.n_fd = ne
    elif mode in (VolumeSchemeMode.AdaptiveRigorous,
                  VolumeSchemeMode.AdaptiveHeuristic):
        run_wf(all_idx)
        s_wf = np.empty(ne)
        kernels.entropy_dot(eq.eq_code, eq.gamma, u, rate, wbar, s_wf)
        s_fd = np.empty(ne)
        kernels.psi_telescope(eq.eq_code, eq.gamma, u, p, mesh.ndims,
                              ops.weights, metric, s_fd)
        if mode is VolumeSchemeMode.AdaptiveRigorous:
            keep_wf = (s_wf - s_fd) < 0.0
        else:
            keep_wf = s_wf < config.indicator.sigma
        fd_idx = all_idx[~keep_wf]
        rate[fd_idx] = 0.0
        if fd_idx.size:
            run_fd(fd_idx)
        report.n_wf = int(keep_wf.sum())
        report.n_fd = fd_idx.size
        s_applied = np.empty(ne)
        kernels.entropy_dot(eq.eq_code, eq.gamma, u, rate, wbar, s_applied)
        report.max_entropy_violation = float(np.max(s_applied - s_fd))
        if config.record_choices:
            report.choices = np.where(keep_wf, CHOICE_WF, CHOICE_FD).astype(np.int8)
            report.s_wf = s_wf
            report.s_fd = s_fd
    elif mode is VolumeSchemeMode.BlendedShock:
        v = indicator_values(eq, u, config.indicator.indicator_variable)
        beta = np.empty(ne)
        kernels.modal_beta(np.ascontiguousarray(v), ops.Vinv, p, mesh.ndims,
                           indicator_threshold(p), KAPPA,
                           config.indicator.beta_min,
                           config.indicator.beta_max, beta)
        if config.indicator.smooth_beta:
            beta = _smooth_beta(beta, mesh, config.indicator.beta_max)
        report.time_indicator = time.perf_counter() - tic
        default_idx = all_idx[beta == 0.0]
        blend_idx = all_idx[beta > 0.0]
        if default_idx.size:
            if config.indicator.sc_default == "WF":
                run_wf(default_idx)
            else:
                run_fd(default_idx)
        fd_part = blend_idx[beta[blend_idx] < 1.0]
        if fd_part.size:
            run_fd(fd_part, scale=1.0 - beta[fd_part])
        if blend_idx.size:
            run_fv(blend_idx, scale=beta[blend_idx])
        report.n_blend = blend_idx.size
        if config.indicator.sc_default == "WF":
            report.n_wf = default_idx.size
        else:
            report.n_fd = default_idx.size
        report.mean_beta = float(beta.mean())
        if config.record_choices:
            report.beta = beta
    else:
        raise ConfigurationError(f"unknown volume mode {mode}")
    report.time_volume = time.perf_counter() - tic

    s_applied_all = np.empty(ne)
    kernels.entropy_dot(eq.eq_code, eq.gamma, u, rate, wbar, s_applied_all)
    report.sdot_volume = float(mesh.jacobian * s_applied_all.sum())

    _apply_surface(rate, fstars, config)
    evaluate_source(u, t, config, rate)

    if config.check_finite and not np.all(np.isfinite(rate)):
        raise DivergenceError("non-finite semidiscrete rate", t=t)
    return rate, report


def _count(report, analytical=0, two_point=0, fv=0):
    report.analytical_evals += analytical
    report.two_point_evals += two_point
    report.fv_evals += fv


def _smooth_beta(beta, mesh, beta_max):
    """One diffusive pass: each element sees half its face-neighbor values."""
    if mesh.ndims == 1:
        n = mesh.cells[0]
        b = beta
        nb = np.maximum(np.roll(b, 1), np.roll(b, -1))
        if not mesh.periodic[0]:
            inner = np.maximum(np.r_[b[1:], 0.0], np.r_[0.0, b[:-1]])
            nb = inner
        out = np.maximum(b, 0.5 * nb)
    else:
        nx, ny = mesh.cells
        b = beta.reshape(ny, nx)
        nb = np.zeros_like(b)
        for axis, periodic in ((1, mesh.periodic[0]), (0, mesh.periodic[1])):
            for shift in (1, -1):
                rolled = np.roll(b, shift, axis=axis)
                if not periodic:
                    if axis == 1 and shift == 1:
                        rolled[:, 0] = 0.0
                    elif axis == 1:
                        rolled[:, -1] = 0.0
                    elif shift == 1:
                        rolled[0, :] = 0.0
                    else:
                        rolled[-1, :] = 0.0
                np.maximum(nb, rolled, out=nb)
        out = np.maximum(b, 0.5 * nb).reshape(-1)
    return np.minimum(out, beta_max)


# -- snapshots -----------------------------------------------------------------

def save_snapshot(path, state: SolutionField, config: SemidiscretizationConfig):
    """Self-describing binary snapshot of a solution field."""
    np.savez(
        path,
        layout="element,node,variable",
        ndims=config.mesh.ndims,
        cells=np.asarray(config.mesh.cells),
        bounds=np.asarray(config.mesh.bounds, dtype=float),
        periodic=np.asarray(config.mesh.periodic),
        p=config.p,
        nvars=config.eq.nvars,
        equation=config.eq.id,
        gamma=config.eq.gamma,
        t=state.t,
        data=state.data,
    )


def load_snapshot(path):
    """Load a snapshot; returns ``(SolutionField, metadata_dict)``."""
    with np.load(path, allow_pickle=False) as z:
        meta = {k: z[k] for k in z.files if k != "data"}
        data = z["data"]
    return SolutionField(data=data, t=float(meta["t"])), meta
