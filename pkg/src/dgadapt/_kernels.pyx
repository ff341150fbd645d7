# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False, language_level=3
"""Compiled mesh-level kernels (Cython backend).

Implements the same interface as ``dgadapt._kernels_py`` (see that module's
docstring for the shared array conventions); the dispatcher in
``dgadapt.backend`` prefers this module when it importable.  All loops release
the GIL so callers may process disjoint element chunks from worker threads.
"""

import time

import numpy as np

from .equations import AdmissibilityError

cimport cython
from libc.math cimport cos, exp, fabs, log, sin, sqrt

DEF MAXV = 4    # conserved variables (Euler 2D)
DEF MAXP1 = 16  # nodes per line (degree cap 15)

cdef double LOG_MEAN_NEAR = 1e-4
cdef double KPP_FALLBACK = 1e-12

cdef int EQ_BURGERS = 0
cdef int EQ_KPP = 1
cdef int EQ_EULER1D = 2
cdef int EQ_EULER2D = 3

cdef int F_CENTRAL = 0
cdef int F_RUSANOV = 1
cdef int F_HLL = 2
cdef int F_HLLC = 3
cdef int F_GODUNOV = 4
cdef int F_EC_RANOCHA = 5
cdef int F_EC_CHANDRA = 6
cdef int F_EC_BURGERS = 7
cdef int F_EC_KPP = 8


def is_compiled():
    return True


# -- pointwise physics --------------------------------------------------------

cdef inline double _pressure(int nv, double gamma, const double* u) nogil:
    cdef double kin = 0.0
    cdef int i
    for i in range(1, nv - 1):
        kin += u[i] * u[i]
    return (gamma - 1.0) * (u[nv - 1] - 0.5 * kin / u[0])


cdef inline int _phys(int eq, double gamma, int nv, const double* u, int d,
                      double* f) nogil:
    cdef double p, vd
    cdef int i
    if eq == EQ_BURGERS:
        f[0] = 0.5 * u[0] * u[0]
        return 0
    if eq == EQ_KPP:
        f[0] = sin(u[0]) if d == 0 else cos(u[0])
        return 0
    if not (u[0] > 0.0):
        return 1
    p = _pressure(nv, gamma, u)
    if not (p > 0.0):
        return 1
    vd = u[1 + d] / u[0]
    f[0] = u[1 + d]
    for i in range(1, nv - 1):
        f[i] = u[i] * vd
    f[1 + d] += p
    f[nv - 1] = (u[nv - 1] + p) * vd
    return 0


cdef inline int _lambda_dir(int eq, double gamma, int nv, const double* u,
                            int d, double* out) nogil:
    cdef double p
    if eq == EQ_BURGERS:
        out[0] = fabs(u[0])
        return 0
    if eq == EQ_KPP:
        out[0] = 1.0
        return 0
    if not (u[0] > 0.0):
        return 1
    p = _pressure(nv, gamma, u)
    if not (p > 0.0):
        return 1
    out[0] = fabs(u[1 + d] / u[0]) + sqrt(gamma * p / u[0])
    return 0


cdef inline int _entropy_w(int eq, double gamma, int nv, const double* u,
                           double* w) nogil:
    cdef double p, s, kin
    cdef int i
    if eq == EQ_BURGERS or eq == EQ_KPP:
        w[0] = u[0]
        return 0
    if not (u[0] > 0.0):
        return 1
    p = _pressure(nv, gamma, u)
    if not (p > 0.0):
        return 1
    s = log(p) - gamma * log(u[0])
    kin = 0.0
    for i in range(1, nv - 1):
        kin += u[i] * u[i]
    kin = 0.5 * kin / u[0]
    w[0] = (gamma - s) / (gamma - 1.0) - kin / p
    for i in range(1, nv - 1):
        w[i] = u[i] / p
    w[nv - 1] = -u[0] / p
    return 0


cdef inline int _entropy_S(int eq, double gamma, int nv, const double* u,
                           double* out) nogil:
    cdef double p, s
    if eq == EQ_BURGERS or eq == EQ_KPP:
        out[0] = 0.5 * u[0] * u[0]
        return 0
    if not (u[0] > 0.0):
        return 1
    p = _pressure(nv, gamma, u)
    if not (p > 0.0):
        return 1
    s = log(p) - gamma * log(u[0])
    out[0] = -u[0] * s / (gamma - 1.0)
    return 0


cdef inline double _psi(int eq, int nv, const double* u, int d) nogil:
    if eq == EQ_BURGERS:
        return u[0] * u[0] * u[0] / 6.0
    if eq == EQ_KPP:
        return -cos(u[0]) if d == 0 else sin(u[0])
    return u[1 + d]


cdef inline double _log_mean(double a, double b) nogil:
    cdef double zeta = a / b
    cdef double f = (zeta - 1.0) / (zeta + 1.0)
    cdef double usq = f * f
    cdef double fac
    if fabs(zeta - 1.0) < LOG_MEAN_NEAR:
        fac = 1.0 + usq / 3.0 + usq * usq / 5.0 + usq * usq * usq / 7.0
    else:
        fac = log(zeta) / (2.0 * f)
    return (a + b) / (2.0 * fac)


cdef inline int _ec_euler(int kind, double gamma, int nv, const double* ul,
                          const double* ur, int d, double* f) nogil:
    cdef double rho_l = ul[0], rho_r = ur[0]
    cdef double pl, pr, rho_ln, frho, fe
    cdef double vl[2]
    cdef double vr[2]
    cdef double vavg[2]
    cdef double pavg, vel_dot, inv_rho_p_ln
    cdef double beta_l, beta_r, beta_ln, rho_avg, beta_avg, kin_avg, p_eff
    cdef int i, nd = nv - 2
    if not (rho_l > 0.0 and rho_r > 0.0):
        return 1
    pl = _pressure(nv, gamma, ul)
    pr = _pressure(nv, gamma, ur)
    if not (pl > 0.0 and pr > 0.0):
        return 1
    for i in range(nd):
        vl[i] = ul[1 + i] / rho_l
        vr[i] = ur[1 + i] / rho_r
        vavg[i] = 0.5 * (vl[i] + vr[i])
    rho_ln = _log_mean(rho_l, rho_r)
    frho = rho_ln * vavg[d]
    f[0] = frho
    for i in range(nd):
        f[1 + i] = frho * vavg[i]
    if kind == F_EC_RANOCHA:
        inv_rho_p_ln = 1.0 / _log_mean(rho_l / pl, rho_r / pr)
        pavg = 0.5 * (pl + pr)
        vel_dot = 0.0
        for i in range(nd):
            vel_dot += vl[i] * vr[i]
        vel_dot *= 0.5
        f[1 + d] += pavg
        f[nv - 1] = frho * (vel_dot + inv_rho_p_ln / (gamma - 1.0)) \
            + 0.5 * (pl * vr[d] + pr * vl[d])
        return 0
    beta_l = 0.5 * rho_l / pl
    beta_r = 0.5 * rho_r / pr
    beta_ln = _log_mean(beta_l, beta_r)
    rho_avg = 0.5 * (rho_l + rho_r)
    beta_avg = 0.5 * (beta_l + beta_r)
    kin_avg = 0.0
    for i in range(nd):
        kin_avg += vl[i] * vl[i] + vr[i] * vr[i]
    kin_avg *= 0.25
    p_eff = 0.5 * rho_avg / beta_avg
    f[1 + d] += p_eff
    fe = frho * (0.5 / ((gamma - 1.0) * beta_ln) - kin_avg)
    for i in range(nd):
        fe += f[1 + i] * vavg[i]
    f[nv - 1] = fe
    return 0


cdef inline int _hll_like(int variant, double gamma, int nv, const double* ul,
                          const double* ur, int d, double* f) nogil:
    # variant: F_HLL or F_HLLC, Davis wave-speed estimates
    cdef double rho_l = ul[0], rho_r = ur[0]
    cdef double pl, pr, vn_l, vn_r, cl, cr, sl, sr, s_star, fac
    cdef double fl[MAXV]
    cdef double fr[MAXV]
    cdef double ustar[MAXV]
    cdef int i
    if not (rho_l > 0.0 and rho_r > 0.0):
        return 1
    pl = _pressure(nv, gamma, ul)
    pr = _pressure(nv, gamma, ur)
    if not (pl > 0.0 and pr > 0.0):
        return 1
    vn_l = ul[1 + d] / rho_l
    vn_r = ur[1 + d] / rho_r
    cl = sqrt(gamma * pl / rho_l)
    cr = sqrt(gamma * pr / rho_r)
    sl = vn_l - cl
    if vn_r - cr < sl:
        sl = vn_r - cr
    sr = vn_l + cl
    if vn_r + cr > sr:
        sr = vn_r + cr
    _phys(EQ_EULER1D if nv == 3 else EQ_EULER2D, gamma, nv, ul, d, fl)
    _phys(EQ_EULER1D if nv == 3 else EQ_EULER2D, gamma, nv, ur, d, fr)
    if sl >= 0.0:
        for i in range(nv):
            f[i] = fl[i]
        return 0
    if sr <= 0.0:
        for i in range(nv):
            f[i] = fr[i]
        return 0
    if variant == F_HLL:
        for i in range(nv):
            f[i] = (sr * fl[i] - sl * fr[i] + sl * sr * (ur[i] - ul[i])) \
                / (sr - sl)
        return 0
    s_star = (pr - pl + rho_l * vn_l * (sl - vn_l)
              - rho_r * vn_r * (sr - vn_r)) \
        / (rho_l * (sl - vn_l) - rho_r * (sr - vn_r))
    if s_star >= 0.0:
        fac = rho_l * (sl - vn_l) / (sl - s_star)
        ustar[0] = fac
        for i in range(1, nv - 1):
            ustar[i] = fac * (ul[i] / rho_l)
        ustar[1 + d] = fac * s_star
        ustar[nv - 1] = fac * (ul[nv - 1] / rho_l + (s_star - vn_l)
                               * (s_star + pl / (rho_l * (sl - vn_l))))
        for i in range(nv):
            f[i] = fl[i] + sl * (ustar[i] - ul[i])
        return 0
    fac = rho_r * (sr - vn_r) / (sr - s_star)
    ustar[0] = fac
    for i in range(1, nv - 1):
        ustar[i] = fac * (ur[i] / rho_r)
    ustar[1 + d] = fac * s_star
    ustar[nv - 1] = fac * (ur[nv - 1] / rho_r + (s_star - vn_r)
                           * (s_star + pr / (rho_r * (sr - vn_r))))
    for i in range(nv):
        f[i] = fr[i] + sr * (ustar[i] - ur[i])
    return 0


cdef inline int _point_flux(int eq, double gamma, int nv, int kind,
                            const double* ul, const double* ur, int d,
                            double* f) nogil:
    """Unified two-point flux dispatch; nonzero return flags a bad state."""
    cdef double fl[MAXV]
    cdef double fr[MAXV]
    cdef double lam, lam2, a, b, db, fa, fb
    cdef int i, err
    if kind == F_CENTRAL:
        err = _phys(eq, gamma, nv, ul, d, fl)
        err = err | _phys(eq, gamma, nv, ur, d, fr)
        if err:
            return err
        for i in range(nv):
            f[i] = 0.5 * (fl[i] + fr[i])
        return 0
    if kind == F_RUSANOV:
        err = _phys(eq, gamma, nv, ul, d, fl)
        err = err | _phys(eq, gamma, nv, ur, d, fr)
        if eq == EQ_KPP:
            # sharp directional estimate instead of the global unit bound
            lam = fabs(cos(ul[0])) if d == 0 else fabs(sin(ul[0]))
            lam2 = fabs(cos(ur[0])) if d == 0 else fabs(sin(ur[0]))
        else:
            err = err | _lambda_dir(eq, gamma, nv, ul, d, &lam)
            err = err | _lambda_dir(eq, gamma, nv, ur, d, &lam2)
        if err:
            return err
        if lam2 > lam:
            lam = lam2
        for i in range(nv):
            f[i] = 0.5 * (fl[i] + fr[i]) - 0.5 * lam * (ur[i] - ul[i])
        return 0
    if kind == F_EC_BURGERS:
        a = ul[0]
        b = ur[0]
        f[0] = (a * a + a * b + b * b) / 6.0
        return 0
    if kind == F_EC_KPP:
        a = ul[0]
        b = ur[0]
        db = b - a
        if fabs(db) <= KPP_FALLBACK:
            f[0] = 0.5 * (sin(a) + sin(b)) if d == 0 \
                else 0.5 * (cos(a) + cos(b))
        elif d == 0:
            f[0] = (cos(a) - cos(b)) / db
        else:
            f[0] = (sin(b) - sin(a)) / db
        return 0
    if kind == F_GODUNOV:
        a = ul[0]
        b = ur[0]
        fa = 0.5 * a * a
        fb = 0.5 * b * b
        if a <= b:
            f[0] = 0.0 if (a <= 0.0 and 0.0 <= b) else (fa if fa < fb else fb)
        else:
            f[0] = fa if fa > fb else fb
        return 0
    if kind == F_EC_RANOCHA or kind == F_EC_CHANDRA:
        return _ec_euler(kind, gamma, nv, ul, ur, d, f)
    if kind == F_HLL or kind == F_HLLC:
        return _hll_like(kind, gamma, nv, ul, ur, d, f)
    return 2  # unknown kind


cdef inline void _raise_bad_state(long long elem, long long node):
    raise AdmissibilityError(
        f"non-admissible state (element {elem}, node {node})",
        element=None if elem < 0 else int(elem),
        node=None if node < 0 else int(node))


# -- batched point fluxes -------------------------------------------------------

def surface_flux_batch(int eq_code, double gamma, int flux_code,
                       const double[:, ::1] ul, const double[:, ::1] ur, int direction,
                       double[:, ::1] out):
    cdef Py_ssize_t n = ul.shape[0]
    cdef int nv = ul.shape[1]
    cdef Py_ssize_t i
    cdef long long bad = -1
    cdef double fbuf[MAXV]
    cdef int j
    with nogil:
        for i in range(n):
            if _point_flux(eq_code, gamma, nv, flux_code, &ul[i, 0],
                           &ur[i, 0], direction, fbuf):
                bad = i
                break
            for j in range(nv):
                out[i, j] = fbuf[j]
    if bad >= 0:
        _raise_bad_state(-1, bad)
    return n


def physical_flux_batch(int eq_code, double gamma, const double[:, ::1] u,
                        int direction, double[:, ::1] out):
    cdef Py_ssize_t n = u.shape[0]
    cdef int nv = u.shape[1]
    cdef Py_ssize_t i
    cdef long long bad = -1
    cdef double fbuf[MAXV]
    cdef int j
    with nogil:
        for i in range(n):
            if _phys(eq_code, gamma, nv, &u[i, 0], direction, fbuf):
                bad = i
                break
            for j in range(nv):
                out[i, j] = fbuf[j]
    if bad >= 0:
        _raise_bad_state(-1, bad)
    return n


# -- volume kernels ---------------------------------------------------------------

def wf_volume(int eq_code, double gamma, const double[:, :, ::1] u,
              const long long[::1] idx, int p, int ndims,
              const double[:, ::1] Dhat, const double[::1] metric,
              double[:, :, ::1] rate):
    cdef Py_ssize_t m = idx.shape[0]
    cdef int nv = u.shape[2]
    cdef int p1 = p + 1
    cdef Py_ssize_t ii
    cdef long long e, bad_e = -1, bad_n = -1
    cdef int a, i, j, v, line, n_a, n_i
    cdef double mx = metric[0]
    cdef double my = metric[1] if ndims == 2 else 0.0
    cdef double coef
    cdef double fbuf[MAXP1][MAXV]
    with nogil:
        for ii in range(m):
            e = idx[ii]
            if ndims == 1:
                for i in range(p1):
                    if _phys(eq_code, gamma, nv, &u[e, i, 0], 0, &fbuf[i][0]):
                        bad_e = e
                        bad_n = i
                        break
                if bad_e >= 0:
                    break
                for a in range(p1):
                    for i in range(p1):
                        coef = mx * Dhat[a, i]
                        for v in range(nv):
                            rate[e, a, v] += coef * fbuf[i][v]
            else:
                # x-direction sweeps, one line per transverse node
                for line in range(p1):
                    for i in range(p1):
                        n_i = i + p1 * line
                        if _phys(eq_code, gamma, nv, &u[e, n_i, 0], 0,
                                 &fbuf[i][0]):
                            bad_e = e
                            bad_n = n_i
                            break
                    if bad_e >= 0:
                        break
                    for a in range(p1):
                        n_a = a + p1 * line
                        for i in range(p1):
                            coef = mx * Dhat[a, i]
                            for v in range(nv):
                                rate[e, n_a, v] += coef * fbuf[i][v]
                if bad_e >= 0:
                    break
                # y-direction sweeps
                for line in range(p1):
                    for j in range(p1):
                        n_i = line + p1 * j
                        if _phys(eq_code, gamma, nv, &u[e, n_i, 0], 1,
                                 &fbuf[j][0]):
                            bad_e = e
                            bad_n = n_i
                            break
                    if bad_e >= 0:
                        break
                    for a in range(p1):
                        n_a = line + p1 * a
                        for j in range(p1):
                            coef = my * Dhat[a, j]
                            for v in range(nv):
                                rate[e, n_a, v] += coef * fbuf[j][v]
                if bad_e >= 0:
                    break
    if bad_e >= 0:
        _raise_bad_state(bad_e, bad_n)
    return m * ndims * p1 ** ndims


def fd_volume(int eq_code, double gamma, int flux_code,
              const double[:, :, ::1] u, const long long[::1] idx, int p,
              int ndims, const double[:, ::1] D, const double[::1] metric,
              object scale, double[:, :, ::1] rate):
    cdef Py_ssize_t m = idx.shape[0]
    cdef int nv = u.shape[2]
    cdef int p1 = p + 1
    cdef Py_ssize_t ii
    cdef long long e, bad_e = -1, bad_n = -1
    cdef int j, k, v, line, n_j, n_k
    cdef double mx = metric[0]
    cdef double my = metric[1] if ndims == 2 else 0.0
    cdef double cjk, ckj, s
    cdef double fec[MAXV]
    cdef bint has_scale = scale is not None
    cdef const double[::1] sc
    if has_scale:
        sc = scale
    with nogil:
        for ii in range(m):
            e = idx[ii]
            s = sc[ii] if has_scale else 1.0
            if ndims == 1:
                for j in range(p1):
                    for k in range(j + 1, p1):
                        if _point_flux(eq_code, gamma, nv, flux_code,
                                       &u[e, j, 0], &u[e, k, 0], 0, fec):
                            bad_e = e
                            bad_n = j
                            break
                        cjk = s * 2.0 * mx * D[j, k]
                        ckj = s * 2.0 * mx * D[k, j]
                        for v in range(nv):
                            rate[e, j, v] -= cjk * fec[v]
                            rate[e, k, v] -= ckj * fec[v]
                    if bad_e >= 0:
                        break
                if bad_e >= 0:
                    break
            else:
                for line in range(p1):
                    for j in range(p1):
                        for k in range(j + 1, p1):
                            # x-direction pair on row `line`
                            n_j = j + p1 * line
                            n_k = k + p1 * line
                            if _point_flux(eq_code, gamma, nv, flux_code,
                                           &u[e, n_j, 0], &u[e, n_k, 0], 0,
                                           fec):
                                bad_e = e
                                bad_n = n_j
                                break
                            cjk = s * 2.0 * mx * D[j, k]
                            ckj = s * 2.0 * mx * D[k, j]
                            for v in range(nv):
                                rate[e, n_j, v] -= cjk * fec[v]
                                rate[e, n_k, v] -= ckj * fec[v]
                            # y-direction pair on column `line`
                            n_j = line + p1 * j
                            n_k = line + p1 * k
                            if _point_flux(eq_code, gamma, nv, flux_code,
                                           &u[e, n_j, 0], &u[e, n_k, 0], 1,
                                           fec):
                                bad_e = e
                                bad_n = n_j
                                break
                            cjk = s * 2.0 * my * D[j, k]
                            ckj = s * 2.0 * my * D[k, j]
                            for v in range(nv):
                                rate[e, n_j, v] -= cjk * fec[v]
                                rate[e, n_k, v] -= ckj * fec[v]
                        if bad_e >= 0:
                            break
                    if bad_e >= 0:
                        break
                if bad_e >= 0:
                    break
    if bad_e >= 0:
        _raise_bad_state(bad_e, bad_n)
    return m * ndims * p * p1 ** ndims // 2


def fv_volume(int eq_code, double gamma, int flux_code,
              const double[:, :, ::1] u, const long long[::1] idx, int p,
              int ndims, const double[::1] weights, const double[::1] metric,
              object scale, double[:, :, ::1] rate):
    cdef Py_ssize_t m = idx.shape[0]
    cdef int nv = u.shape[2]
    cdef int p1 = p + 1
    cdef Py_ssize_t ii
    cdef long long e, bad_e = -1, bad_n = -1
    cdef int j, v, line, n_j, n_jp
    cdef double mx = metric[0]
    cdef double my = metric[1] if ndims == 2 else 0.0
    cdef double s, cj
    cdef double fprev[MAXV]
    cdef double fcur[MAXV]
    cdef bint has_scale = scale is not None
    cdef const double[::1] sc
    if has_scale:
        sc = scale
    with nogil:
        for ii in range(m):
            e = idx[ii]
            s = sc[ii] if has_scale else 1.0
            if ndims == 1:
                for v in range(nv):
                    fprev[v] = 0.0
                for j in range(p):
                    if _point_flux(eq_code, gamma, nv, flux_code, &u[e, j, 0],
                                   &u[e, j + 1, 0], 0, fcur):
                        bad_e = e
                        bad_n = j
                        break
                    cj = s * mx / weights[j]
                    for v in range(nv):
                        rate[e, j, v] -= cj * (fcur[v] - fprev[v])
                        fprev[v] = fcur[v]
                if bad_e >= 0:
                    break
                cj = s * mx / weights[p]
                for v in range(nv):
                    rate[e, p, v] -= cj * (0.0 - fprev[v])
            else:
                for line in range(p1):
                    # x-direction subcells along row `line`
                    for v in range(nv):
                        fprev[v] = 0.0
                    for j in range(p):
                        n_j = j + p1 * line
                        n_jp = j + 1 + p1 * line
                        if _point_flux(eq_code, gamma, nv, flux_code,
                                       &u[e, n_j, 0], &u[e, n_jp, 0], 0,
                                       fcur):
                            bad_e = e
                            bad_n = n_j
                            break
                        cj = s * mx / weights[j]
                        for v in range(nv):
                            rate[e, n_j, v] -= cj * (fcur[v] - fprev[v])
                            fprev[v] = fcur[v]
                    if bad_e >= 0:
                        break
                    cj = s * mx / weights[p]
                    n_j = p + p1 * line
                    for v in range(nv):
                        rate[e, n_j, v] -= cj * (0.0 - fprev[v])
                    # y-direction subcells along column `line`
                    for v in range(nv):
                        fprev[v] = 0.0
                    for j in range(p):
                        n_j = line + p1 * j
                        n_jp = line + p1 * (j + 1)
                        if _point_flux(eq_code, gamma, nv, flux_code,
                                       &u[e, n_j, 0], &u[e, n_jp, 0], 1,
                                       fcur):
                            bad_e = e
                            bad_n = n_j
                            break
                        cj = s * my / weights[j]
                        for v in range(nv):
                            rate[e, n_j, v] -= cj * (fcur[v] - fprev[v])
                            fprev[v] = fcur[v]
                    if bad_e >= 0:
                        break
                    cj = s * my / weights[p]
                    n_j = line + p1 * p
                    for v in range(nv):
                        rate[e, n_j, v] -= cj * (0.0 - fprev[v])
                if bad_e >= 0:
                    break
    if bad_e >= 0:
        _raise_bad_state(bad_e, bad_n)
    return m * ndims * p * p1 ** (ndims - 1)


# -- entropy tallies ------------------------------------------------------------

def entropy_dot(int eq_code, double gamma, const double[:, :, ::1] u,
                const double[:, :, ::1] rate, const double[::1] wbar,
                double[::1] out):
    cdef Py_ssize_t ne = u.shape[0]
    cdef Py_ssize_t nn = u.shape[1]
    cdef int nv = u.shape[2]
    cdef Py_ssize_t e, n
    cdef long long bad_e = -1, bad_n = -1
    cdef int v
    cdef double wv[MAXV]
    cdef double acc, comp, term, y, t
    with nogil:
        for e in range(ne):
            acc = 0.0
            comp = 0.0
            for n in range(nn):
                if _entropy_w(eq_code, gamma, nv, &u[e, n, 0], wv):
                    bad_e = e
                    bad_n = n
                    break
                term = 0.0
                for v in range(nv):
                    term += wv[v] * rate[e, n, v]
                term *= wbar[n]
                # Kahan compensation: the selection compares small differences
                y = term - comp
                t = acc + y
                comp = (t - acc) - y
                acc = t
            if bad_e >= 0:
                break
            out[e] = acc
    if bad_e >= 0:
        _raise_bad_state(bad_e, bad_n)
    return np.asarray(out)


def psi_telescope(int eq_code, double gamma, const double[:, :, ::1] u,
                  int p, int ndims, const double[::1] weights,
                  const double[::1] metric, double[::1] out):
    cdef Py_ssize_t ne = u.shape[0]
    cdef int nv = u.shape[2]
    cdef int p1 = p + 1
    cdef Py_ssize_t e
    cdef int line
    cdef double acc
    with nogil:
        for e in range(ne):
            if ndims == 1:
                out[e] = metric[0] * (_psi(eq_code, nv, &u[e, p, 0], 0)
                                      - _psi(eq_code, nv, &u[e, 0, 0], 0))
            else:
                acc = 0.0
                for line in range(p1):
                    acc += metric[0] * weights[line] * (
                        _psi(eq_code, nv, &u[e, p + p1 * line, 0], 0)
                        - _psi(eq_code, nv, &u[e, p1 * line, 0], 0))
                    acc += metric[1] * weights[line] * (
                        _psi(eq_code, nv, &u[e, line + p1 * p, 0], 1)
                        - _psi(eq_code, nv, &u[e, line, 0], 1))
                out[e] = acc
    return np.asarray(out)


def entropy_sum(int eq_code, double gamma, const double[:, :, ::1] u,
                const double[::1] wbar, double[::1] out):
    cdef Py_ssize_t ne = u.shape[0]
    cdef Py_ssize_t nn = u.shape[1]
    cdef int nv = u.shape[2]
    cdef Py_ssize_t e, n
    cdef long long bad_e = -1, bad_n = -1
    cdef double acc, sval
    with nogil:
        for e in range(ne):
            acc = 0.0
            for n in range(nn):
                if _entropy_S(eq_code, gamma, nv, &u[e, n, 0], &sval):
                    bad_e = e
                    bad_n = n
                    break
                acc += wbar[n] * sval
            if bad_e >= 0:
                break
            out[e] = acc
    if bad_e >= 0:
        _raise_bad_state(bad_e, bad_n)
    return np.asarray(out)


# -- CFL --------------------------------------------------------------------------

def min_dx_over_lambda(int eq_code, double gamma,
                       const double[:, :, ::1] u, const double[::1] dx):
    cdef Py_ssize_t ne = u.shape[0]
    cdef Py_ssize_t nn = u.shape[1]
    cdef int nv = u.shape[2]
    cdef int ndims = dx.shape[0]
    cdef Py_ssize_t e, n
    cdef long long bad_e = -1, bad_n = -1
    cdef int d
    cdef double lam, ratio, best
    best = np.inf
    with nogil:
        for e in range(ne):
            for n in range(nn):
                for d in range(ndims):
                    if _lambda_dir(eq_code, gamma, nv, &u[e, n, 0], d, &lam):
                        bad_e = e
                        bad_n = n
                        break
                    if lam > 0.0:
                        ratio = dx[d] / lam
                        if ratio < best:
                            best = ratio
                if bad_e >= 0:
                    break
            if bad_e >= 0:
                break
    if bad_e >= 0:
        _raise_bad_state(bad_e, bad_n)
    return best


# -- modal smoothness indicator ----------------------------------------------------

def modal_beta(const double[:, ::1] v, const double[:, ::1] Vinv, int p, int ndims,
               double threshold, double kappa, double beta_min,
               double beta_max, double[::1] out):
    cdef Py_ssize_t ne = v.shape[0]
    cdef int p1 = p + 1
    cdef Py_ssize_t e
    cdef int a, b, j, k, q
    cdef double msq, total, e_top, e_second, E1, eps0, eps1, eps, beta
    cdef double mbuf[MAXP1][MAXP1]
    cdef double tbuf[MAXP1][MAXP1]
    with nogil:
        for e in range(ne):
            total = 0.0
            e_top = 0.0
            e_second = 0.0
            if ndims == 1:
                for a in range(p1):
                    msq = 0.0
                    for j in range(p1):
                        msq += Vinv[a, j] * v[e, j]
                    mbuf[0][a] = msq * msq
                    total += mbuf[0][a]
                e_top = mbuf[0][p]
                e_second = mbuf[0][p - 1] if p >= 1 else 0.0
            else:
                # separable transform: tbuf = Vinv @ v3, mbuf = tbuf @ Vinv^T
                for a in range(p1):
                    for k in range(p1):
                        msq = 0.0
                        for j in range(p1):
                            msq += Vinv[a, j] * v[e, j * p1 + k]
                        tbuf[a][k] = msq
                for a in range(p1):
                    for b in range(p1):
                        msq = 0.0
                        for k in range(p1):
                            msq += tbuf[a][k] * Vinv[b, k]
                        mbuf[a][b] = msq * msq
                        total += mbuf[a][b]
                for b in range(p1):
                    e_top += mbuf[p][b]
                for a in range(p1):
                    e_top += mbuf[a][p]
                e_top -= mbuf[p][p]
                if p >= 2:
                    q = p - 1
                    for b in range(q + 1):
                        e_second += mbuf[q][b]
                    for a in range(q + 1):
                        e_second += mbuf[a][q]
                    e_second -= mbuf[q][q]
            E1 = total - e_top
            eps0 = e_top / total if total > 0.0 else 0.0
            eps1 = e_second / E1 if (E1 > 0.0 and p >= 2) else 0.0
            eps = eps0 if eps0 > eps1 else eps1
            beta = 1.0 / (1.0 + exp(-kappa * (eps - threshold) / threshold))
            if total == 0.0:
                beta = 0.0
            if beta < beta_min:
                beta = 0.0
            if beta > beta_max:
                beta = beta_max
            out[e] = beta
    return np.asarray(out)


# -- microbenchmark ------------------------------------------------------------------

def bench_flux(int eq_code, double gamma, int flux_code,
               const double[:, ::1] ul, const double[:, ::1] ur,
               int direction, int repeats):
    cdef Py_ssize_t n = ul.shape[0]
    cdef int nv = ul.shape[1]
    cdef Py_ssize_t i
    cdef int r, v, err = 0
    cdef double fbuf[MAXV]
    cdef double sink = 0.0
    t0 = time.perf_counter()
    with nogil:
        for r in range(repeats):
            for i in range(n):
                if flux_code < 0:
                    err |= _phys(eq_code, gamma, nv, &ul[i, 0], direction,
                                 fbuf)
                    sink += fbuf[0]
                    err |= _phys(eq_code, gamma, nv, &ur[i, 0], direction,
                                 fbuf)
                    sink += fbuf[0]
                else:
                    err |= _point_flux(eq_code, gamma, nv, flux_code,
                                       &ul[i, 0], &ur[i, 0], direction, fbuf)
                    for v in range(nv):
                        sink += fbuf[v]
    elapsed = time.perf_counter() - t0
    if err:
        raise AdmissibilityError("non-admissible benchmark state")
    nevals = (2 if flux_code < 0 else 1) * n * repeats
    # keep `sink` alive so the loop cannot be optimized away
    if sink != sink:
        raise FloatingPointError("benchmark produced NaN")
    return elapsed, nevals
