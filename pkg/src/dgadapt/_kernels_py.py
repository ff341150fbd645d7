"""Pure-NumPy mesh-level kernels (fallback backend).

This module and the compiled extension ``dgadapt._kernels`` implement the
same interface; one of them is selected at import time by
:mod:`dgadapt.backend`.  The hot operations are the per-element volume-term
kernels, batched two-point flux evaluations, entropy tallies and the modal
smoothness indicator.

Shared conventions
------------------
* ``u``/``rate`` are C-contiguous float64 arrays shaped
  ``(nelem, nnodes, nvars)`` with ``nnodes = (p+1)**ndims`` and the 2D node
  multi-index flattened as ``n = ix + (p+1)*iy``.
* ``idx`` is an int64 array of element indices to process.
* ``metric[d] = 2 / dx[d]`` maps reference derivatives to physical ones.
* Volume kernels *accumulate* into ``rate`` (callers zero the target rows)
  and return flux-evaluation counts.
* Kernel sign convention: kernels return the complete volume term of the
  semidiscretization, i.e. including their own ``M^{-1} B f`` boundary-node
  part, so that the interface-flux term ``-M^{-1} B f*`` added afterwards by
  the semidiscretization completes any of the schemes interchangeably.
"""

from __future__ import annotations

import time

import numpy as np

from . import equations as eqs
from .equations import FLUX_CODES, FluxKind

_CODE_TO_FLUX = {v: k for k, v in FLUX_CODES.items()}

_EQ_BY_CODE = {}


def _descriptor(eq_code: int, gamma: float):
    key = (eq_code, gamma)
    if key not in _EQ_BY_CODE:
        by_code = {v[0]: k for k, v in eqs._EQ_IDS.items()}
        _EQ_BY_CODE[key] = eqs.equation(by_code[eq_code], gamma)
    return _EQ_BY_CODE[key]


def is_compiled() -> bool:
    return False


# -- batched point fluxes ----------------------------------------------------

def surface_flux_batch(eq_code, gamma, flux_code, ul, ur, direction, out):
    """Interface flux for ``n`` left/right state pairs; returns eval count."""
    eq = _descriptor(eq_code, gamma)
    kind = _CODE_TO_FLUX[flux_code]
    out[...] = eqs.surface_flux(eq, kind, ul, ur, direction)
    return ul.shape[0]


def physical_flux_batch(eq_code, gamma, u, direction, out):
    eq = _descriptor(eq_code, gamma)
    out[...] = eqs.physical_flux(eq, u, direction)
    return u.shape[0]


# -- volume kernels ----------------------------------------------------------

def wf_volume(eq_code, gamma, u, idx, p, ndims, Dhat, metric, rate):
    """Weak-form volume term ``metric * (M^{-1} D^T M) f`` per direction.

    Returns the number of analytical flux evaluations,
    ``len(idx) * ndims * (p+1)**ndims``.
    """
    eq = _descriptor(eq_code, gamma)
    p1 = p + 1
    nv = u.shape[2]
    usel = u[idx]
    if ndims == 1:
        f = eqs.physical_flux(eq, usel, 0)
        rate[idx] += metric[0] * np.einsum("ai,eiv->eav", Dhat, f)
        return idx.size * p1
    u4 = usel.reshape(idx.size, p1, p1, nv)
    fx = eqs.physical_flux(eq, u4, 0)
    fy = eqs.physical_flux(eq, u4, 1)
    contrib = metric[0] * np.einsum("ai,ejiv->ejav", Dhat, fx)
    contrib += metric[1] * np.einsum("aj,ejiv->eaiv", Dhat, fy)
    rate[idx] += contrib.reshape(idx.size, p1 * p1, nv)
    return idx.size * 2 * p1 * p1


def fd_volume(eq_code, gamma, flux_code, u, idx, p, ndims, D, metric,
              scale, rate):
    """Flux-differencing volume term with a symmetric two-point volume flux.

    Evaluates each unordered off-diagonal node pair once per line; the
    derivative-split matrix has an exactly zero diagonal (SBP), so its
    ``M^{-1} B f`` boundary part is absorbed by the diagonal and the kernel
    reduces to the pair sum.  ``scale`` is an optional per-element multiplier
    (used by the DG-FV blend).  Returns the two-point evaluation count,
    ``len(idx) * (ndims p / 2) (p+1)**ndims``.
    """
    eq = _descriptor(eq_code, gamma)
    kind = _CODE_TO_FLUX[flux_code]
    p1 = p + 1
    nv = u.shape[2]
    m = idx.size
    usel = u[idx]
    s = np.ones(m) if scale is None else scale
    if ndims == 1:
        contrib = np.zeros((m, p1, nv))
        for j in range(p1):
            for k in range(j + 1, p1):
                fec = eqs.ec_two_point_flux(eq, kind, usel[:, j], usel[:, k], 0)
                contrib[:, j] -= (2.0 * metric[0] * D[j, k]) * fec
                contrib[:, k] -= (2.0 * metric[0] * D[k, j]) * fec
        rate[idx] += s[:, None, None] * contrib
        return m * (p1 * p // 2)
    u4 = usel.reshape(m, p1, p1, nv)
    contrib = np.zeros((m, p1, p1, nv))
    for j in range(p1):
        for k in range(j + 1, p1):
            fec = eqs.ec_two_point_flux(eq, kind, u4[:, :, j], u4[:, :, k], 0)
            contrib[:, :, j] -= (2.0 * metric[0] * D[j, k]) * fec
            contrib[:, :, k] -= (2.0 * metric[0] * D[k, j]) * fec
            fec = eqs.ec_two_point_flux(eq, kind, u4[:, j], u4[:, k], 1)
            contrib[:, j] -= (2.0 * metric[1] * D[j, k]) * fec
            contrib[:, k] -= (2.0 * metric[1] * D[k, j]) * fec
    rate[idx] += s[:, None, None] * contrib.reshape(m, p1 * p1, nv)
    return m * 2 * (p1 * p1 * p // 2)


def fv_volume(eq_code, gamma, flux_code, u, idx, p, ndims, weights,
              metric, scale, rate):
    """First-order subcell finite-volume update (interior subcell faces only).

    Subcell widths are the quadrature weights; the outermost subcell faces
    are owned by the semidiscretization's interface-flux term.  Returns the
    number of two-point interface-flux evaluations.
    """
    eq = _descriptor(eq_code, gamma)
    kind = _CODE_TO_FLUX[flux_code]
    p1 = p + 1
    nv = u.shape[2]
    m = idx.size
    usel = u[idx]
    s = np.ones(m) if scale is None else scale
    if ndims == 1:
        fbar = np.stack(
            [eqs.surface_flux(eq, kind, usel[:, j], usel[:, j + 1], 0)
             for j in range(p)], axis=1)
        contrib = np.zeros((m, p1, nv))
        contrib[:, :p] -= fbar
        contrib[:, 1:] += fbar
        contrib *= metric[0] / weights[None, :, None]
        rate[idx] += s[:, None, None] * contrib
        return m * p
    u4 = usel.reshape(m, p1, p1, nv)
    contrib = np.zeros((m, p1, p1, nv))
    fbx = np.stack(
        [eqs.surface_flux(eq, kind, u4[:, :, j], u4[:, :, j + 1], 0)
         for j in range(p)], axis=2)
    contrib[:, :, :p] -= fbx
    contrib[:, :, 1:] += fbx
    contrib *= metric[0] / weights[None, None, :, None]
    fby = np.stack(
        [eqs.surface_flux(eq, kind, u4[:, j], u4[:, j + 1], 1)
         for j in range(p)], axis=1)
    cy = np.zeros_like(contrib)
    cy[:, :p] -= fby
    cy[:, 1:] += fby
    cy *= metric[1] / weights[None, :, None, None]
    contrib += cy
    rate[idx] += s[:, None, None] * contrib.reshape(m, p1 * p1, nv)
    return m * 2 * p * p1


# -- entropy tallies ---------------------------------------------------------

def entropy_dot(eq_code, gamma, u, rate, wbar, out):
    """Per-element ``sum_j wbar_j w(u_j) . rate_j`` (reference-space rate)."""
    eq = _descriptor(eq_code, gamma)
    w = eqs.entropy_vars(eq, u)
    out[...] = np.einsum("j,ejv,ejv->e", wbar, w, rate)
    return out


def psi_telescope(eq_code, gamma, u, p, ndims, weights, metric, out):
    """Flux-differencing volume-term entropy production via the potential.

    Equals :func:`entropy_dot` applied to the explicit flux-differencing
    kernel, but costs only surface evaluations of ``psi``.
    """
    eq = _descriptor(eq_code, gamma)
    p1 = p + 1
    if ndims == 1:
        psi_lo = eqs.entropy_potential(eq, u[:, 0], 0)
        psi_hi = eqs.entropy_potential(eq, u[:, p], 0)
        out[...] = metric[0] * (psi_hi - psi_lo)
        return out
    u4 = u.reshape(u.shape[0], p1, p1, u.shape[2])
    px = eqs.entropy_potential(eq, u4[:, :, p], 0) \
        - eqs.entropy_potential(eq, u4[:, :, 0], 0)
    py = eqs.entropy_potential(eq, u4[:, p], 1) \
        - eqs.entropy_potential(eq, u4[:, 0], 1)
    out[...] = metric[0] * (px @ weights) + metric[1] * (py @ weights)
    return out


def entropy_sum(eq_code, gamma, u, wbar, out):
    """Per-element quadrature of the entropy, ``sum_j wbar_j S(u_j)``."""
    eq = _descriptor(eq_code, gamma)
    out[...] = eqs.entropy_function(eq, u) @ wbar
    return out


# -- CFL ----------------------------------------------------------------------

def min_dx_over_lambda(eq_code, gamma, u, dx):
    """``min`` over nodes and directions of ``dx_dir / lambda_dir(u)``."""
    eq = _descriptor(eq_code, gamma)
    best = np.inf
    for d in range(len(dx)):
        if eq.eq_code == eqs.EQ_BURGERS:
            lam = np.abs(u[..., 0])
        elif eq.eq_code == eqs.EQ_KPP:
            lam = np.ones(u.shape[:-1])
        else:
            lam = np.abs(u[..., 1 + d] / u[..., 0]) + eqs.sound_speed(eq, u)
        lam_max = float(np.max(lam))
        if lam_max > 0.0:
            positive = lam[lam > 0.0]
            best = min(best, float(np.min(dx[d] / positive)))
    return best


# -- modal smoothness indicator ----------------------------------------------

def modal_beta(v, Vinv, p, ndims, threshold, kappa, beta_min, beta_max, out):
    """Blending factor from the modal energy distribution of ``v``.

    ``v`` holds the nodal indicator variable, shaped ``(nelem, nnodes)``.
    ``out`` receives the clipped blending factors.
    """
    nelem = v.shape[0]
    p1 = p + 1
    if ndims == 1:
        m = v @ Vinv.T
        msq = m * m
        e_top = msq[:, p]
        e_second = msq[:, p - 1] if p >= 1 else np.zeros(nelem)
        total = msq.sum(axis=1)
    else:
        v3 = v.reshape(nelem, p1, p1)
        m = np.einsum("aj,bk,ejk->eab", Vinv, Vinv, v3)
        msq = m * m
        total = msq.sum(axis=(1, 2))
        e_top = msq[:, p, :].sum(axis=1) + msq[:, :, p].sum(axis=1) \
            - msq[:, p, p]
        if p >= 2:
            q = p - 1
            e_second = msq[:, q, :q + 1].sum(axis=1) \
                + msq[:, :q + 1, q].sum(axis=1) - msq[:, q, q]
        else:
            e_second = np.zeros(nelem)
    E0 = total
    E1 = total - e_top
    eps0 = np.where(E0 > 0.0, e_top / np.where(E0 > 0.0, E0, 1.0), 0.0)
    # the two-mode comparison needs p >= 2; below that only eps0 is meaningful
    use1 = (E1 > 0.0) & (p >= 2)
    eps1 = np.where(use1, e_second / np.where(use1, E1, 1.0), 0.0)
    eps = np.maximum(eps0, eps1)
    beta = 1.0 / (1.0 + np.exp(-kappa * (eps - threshold) / threshold))
    beta[E0 == 0.0] = 0.0
    beta[beta < beta_min] = 0.0
    np.minimum(beta, beta_max, out=beta)
    out[...] = beta
    return out


# -- microbenchmark -----------------------------------------------------------

def bench_flux(eq_code, gamma, flux_code, ul, ur, direction, repeats):
    """Time ``repeats`` sweeps of a flux over the given state pairs.

    ``flux_code = -1`` times the analytical flux (evaluated on both states,
    per-evaluation cost averaged accordingly).  Returns
    ``(elapsed_seconds, n_evaluations)``.
    """
    eq = _descriptor(eq_code, gamma)
    n = ul.shape[0]
    if flux_code < 0:
        t0 = time.perf_counter()
        for _ in range(repeats):
            eqs.physical_flux(eq, ul, direction)
            eqs.physical_flux(eq, ur, direction)
        return time.perf_counter() - t0, 2 * n * repeats
    kind = _CODE_TO_FLUX[flux_code]
    t0 = time.perf_counter()
    for _ in range(repeats):
        eqs.surface_flux(eq, kind, ul, ur, direction)
    return time.perf_counter() - t0, n * repeats
