"""Conservation-law descriptors and flux functions.

Supported systems: the inviscid Burgers equation (1D scalar), the
Kurganov-Petrova-Popov equation (2D scalar with fluxes ``sin u`` / ``cos u``),
and the compressible Euler equations in one and two space dimensions.

All flux and entropy routines are vectorized over arbitrary leading axes;
states are arrays shaped ``(..., nvars)``.  Euler states are conserved
variables ``(rho, rho*v..., rho*E)``.

Each equation carries a mathematical entropy pair: the convex entropy
``S(u)``, entropy variables ``w = dS/du``, entropy fluxes ``F_dir`` and
entropy potentials ``psi_dir = w . f_dir - F_dir``.  Entropy-conservative
two-point fluxes satisfy the Tadmor condition
``(w_r - w_l) . f(u_l, u_r) = psi_dir(u_r) - psi_dir(u_l)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AdmissibilityError",
    "ConfigurationError",
    "EquationDescriptor",
    "FluxKind",
    "equation",
    "physical_flux",
    "max_wave_speed",
    "entropy_quantities",
    "entropy_function",
    "entropy_vars",
    "entropy_potential",
    "ec_two_point_flux",
    "surface_flux",
    "primitive_to_conserved",
    "conserved_to_primitive",
    "log_mean",
]

# equation ids shared with the compiled kernels
EQ_BURGERS = 0
EQ_KPP = 1
EQ_EULER1D = 2
EQ_EULER2D = 3

_EQ_IDS = {
    "burgers1d": (EQ_BURGERS, 1, 1),
    "kpp2d": (EQ_KPP, 1, 2),
    "euler1d": (EQ_EULER1D, 3, 1),
    "euler2d": (EQ_EULER2D, 4, 2),
}

# relative node distance below which the logarithmic mean switches to its
# series expansion
LOG_MEAN_EPS = 1e-4
# state jump below which the KPP entropy-conservative flux falls back to the
# central flux
KPP_EC_FALLBACK = 1e-12


class AdmissibilityError(ValueError):
    """A state left the admissible set (Euler: rho <= 0 or p <= 0)."""

    def __init__(self, message, element=None, node=None):
        super().__init__(message)
        self.element = element
        self.node = node


class ConfigurationError(ValueError):
    """Incompatible equation / flux / parameter combination."""


class FluxKind(enum.Enum):
    """Two-point flux functions, both interface and volume flavors."""

    Central = "central"
    Rusanov = "rusanov"
    HLL_Davis = "hll_davis"
    HLLC = "hllc"
    GodunovBurgers = "godunov_burgers"
    EC_Ranocha = "ec_ranocha"
    EC_Chandrashekar = "ec_chandrashekar"
    EC_Burgers = "ec_burgers"
    EC_KPP = "ec_kpp"

    @property
    def is_entropy_conservative(self) -> bool:
        return self.name.startswith("EC_")

    @property
    def is_volume_kind(self) -> bool:
        """Kinds admissible as flux-differencing volume fluxes."""
        return self.is_entropy_conservative or self is FluxKind.Central


# integer codes shared with the compiled kernels
FLUX_CODES = {
    FluxKind.Central: 0,
    FluxKind.Rusanov: 1,
    FluxKind.HLL_Davis: 2,
    FluxKind.HLLC: 3,
    FluxKind.GodunovBurgers: 4,
    FluxKind.EC_Ranocha: 5,
    FluxKind.EC_Chandrashekar: 6,
    FluxKind.EC_Burgers: 7,
    FluxKind.EC_KPP: 8,
}


@dataclass(frozen=True)
class EquationDescriptor:
    """A conservation law: identity, sizes and (for Euler) gamma."""

    id: str
    nvars: int
    ndims: int
    gamma: float = 1.4

    @property
    def eq_code(self) -> int:
        return _EQ_IDS[self.id][0]

    @property
    def is_euler(self) -> bool:
        return self.id in ("euler1d", "euler2d")


def equation(id: str, gamma: float = 1.4) -> EquationDescriptor:
    """Look up an equation descriptor by id."""
    if id not in _EQ_IDS:
        raise ConfigurationError(f"unknown equation id {id!r}")
    if gamma <= 1.0:
        raise ConfigurationError(f"gamma must exceed 1, got {gamma}")
    code, nvars, ndims = _EQ_IDS[id]
    return EquationDescriptor(id=id, nvars=nvars, ndims=ndims, gamma=gamma)


def _as_state(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 0:
        u = u[None]
    return u


def _check_direction(eq: EquationDescriptor, direction: int):
    if not 0 <= direction < eq.ndims:
        raise ConfigurationError(
            f"direction {direction} invalid for {eq.id} (ndims={eq.ndims})"
        )


def _euler_pressure(eq: EquationDescriptor, u: np.ndarray) -> np.ndarray:
    rho = u[..., 0]
    mom = u[..., 1:-1]
    E = u[..., -1]
    kin = 0.5 * np.sum(mom * mom, axis=-1) / rho
    return (eq.gamma - 1.0) * (E - kin)


def check_admissible(eq: EquationDescriptor, u, element=None, node=None):
    """Raise :class:`AdmissibilityError` if any Euler state is non-physical."""
    if not eq.is_euler:
        return
    u = _as_state(u)
    rho = u[..., 0]
    p = _euler_pressure(eq, u)
    bad = ~((rho > 0.0) & (p > 0.0) & np.isfinite(rho) & np.isfinite(p))
    if np.any(bad):
        idx = np.unravel_index(np.argmax(bad), bad.shape)
        raise AdmissibilityError(
            f"non-admissible Euler state at index {idx}: rho={rho[idx]:.6g}, "
            f"p={p[idx]:.6g}",
            element=element,
            node=node,
        )


def primitive_to_conserved(eq: EquationDescriptor, prim) -> np.ndarray:
    """Euler: map ``(rho, v..., p)`` to ``(rho, rho v..., rho E)``."""
    prim = _as_state(prim)
    if not eq.is_euler:
        return prim.copy()
    rho = prim[..., 0]
    v = prim[..., 1:-1]
    p = prim[..., -1]
    if np.any(rho <= 0.0) or np.any(p <= 0.0):
        raise AdmissibilityError("primitive state with non-positive rho or p")
    u = np.empty_like(prim)
    u[..., 0] = rho
    u[..., 1:-1] = rho[..., None] * v
    u[..., -1] = p / (eq.gamma - 1.0) + 0.5 * rho * np.sum(v * v, axis=-1)
    return u


def conserved_to_primitive(eq: EquationDescriptor, u) -> np.ndarray:
    """Euler: inverse of :func:`primitive_to_conserved`; checks admissibility."""
    u = _as_state(u)
    if not eq.is_euler:
        return u.copy()
    check_admissible(eq, u)
    rho = u[..., 0]
    prim = np.empty_like(u)
    prim[..., 0] = rho
    prim[..., 1:-1] = u[..., 1:-1] / rho[..., None]
    prim[..., -1] = _euler_pressure(eq, u)
    return prim


def physical_flux(eq: EquationDescriptor, u, direction: int = 0) -> np.ndarray:
    """Analytical flux ``f_dir(u)``."""
    u = _as_state(u)
    _check_direction(eq, direction)
    if eq.eq_code == EQ_BURGERS:
        return 0.5 * u * u
    if eq.eq_code == EQ_KPP:
        return np.sin(u) if direction == 0 else np.cos(u)
    check_admissible(eq, u)
    rho = u[..., 0]
    p = _euler_pressure(eq, u)
    vd = u[..., 1 + direction] / rho
    f = np.empty_like(u)
    f[..., 0] = u[..., 1 + direction]
    f[..., 1:-1] = u[..., 1:-1] * vd[..., None]
    f[..., 1 + direction] += p
    f[..., -1] = (u[..., -1] + p) * vd
    return f


def sound_speed(eq: EquationDescriptor, u) -> np.ndarray:
    u = _as_state(u)
    check_admissible(eq, u)
    return np.sqrt(eq.gamma * _euler_pressure(eq, u) / u[..., 0])


def max_wave_speed(eq: EquationDescriptor, u_l, u_r, direction: int = 0):
    """Upper bound on the directional wave speeds over the two states."""
    u_l, u_r = _as_state(u_l), _as_state(u_r)
    _check_direction(eq, direction)
    if eq.eq_code == EQ_BURGERS:
        return np.maximum(np.abs(u_l[..., 0]), np.abs(u_r[..., 0]))
    if eq.eq_code == EQ_KPP:
        # |f_x'| = |cos u| <= 1, |f_y'| = |sin u| <= 1
        return np.ones(np.broadcast_shapes(u_l[..., 0].shape, u_r[..., 0].shape))
    lam_l = np.abs(u_l[..., 1 + direction] / u_l[..., 0]) + sound_speed(eq, u_l)
    lam_r = np.abs(u_r[..., 1 + direction] / u_r[..., 0]) + sound_speed(eq, u_r)
    return np.maximum(lam_l, lam_r)


# -- entropy pair -----------------------------------------------------------

def entropy_function(eq: EquationDescriptor, u) -> np.ndarray:
    """Mathematical entropy ``S(u)`` (Euler: ``-rho s / (gamma - 1)``)."""
    u = _as_state(u)
    if not eq.is_euler:
        return 0.5 * u[..., 0] ** 2
    check_admissible(eq, u)
    rho = u[..., 0]
    p = _euler_pressure(eq, u)
    s = np.log(p) - eq.gamma * np.log(rho)
    return -rho * s / (eq.gamma - 1.0)


def entropy_vars(eq: EquationDescriptor, u) -> np.ndarray:
    """Entropy variables ``w = dS/du``."""
    u = _as_state(u)
    if not eq.is_euler:
        return u.copy()
    check_admissible(eq, u)
    rho = u[..., 0]
    p = _euler_pressure(eq, u)
    v = u[..., 1:-1] / rho[..., None]
    s = np.log(p) - eq.gamma * np.log(rho)
    w = np.empty_like(u)
    w[..., 0] = (eq.gamma - s) / (eq.gamma - 1.0) \
        - 0.5 * rho * np.sum(v * v, axis=-1) / p
    w[..., 1:-1] = rho[..., None] * v / p[..., None]
    w[..., -1] = -rho / p
    return w


def entropy_potential(eq: EquationDescriptor, u, direction: int = 0):
    """Entropy potential ``psi_dir = w . f_dir - F_dir``."""
    u = _as_state(u)
    _check_direction(eq, direction)
    if eq.eq_code == EQ_BURGERS:
        return u[..., 0] ** 3 / 6.0
    if eq.eq_code == EQ_KPP:
        q = u[..., 0]
        return -np.cos(q) if direction == 0 else np.sin(q)
    check_admissible(eq, u)
    return u[..., 1 + direction]


def entropy_flux(eq: EquationDescriptor, u, direction: int = 0):
    """Entropy flux ``F_dir`` with ``dF/du = w^T df/du``."""
    u = _as_state(u)
    _check_direction(eq, direction)
    if eq.eq_code == EQ_BURGERS:
        return u[..., 0] ** 3 / 3.0
    if eq.eq_code == EQ_KPP:
        q = u[..., 0]
        if direction == 0:
            return q * np.sin(q) + np.cos(q)
        return q * np.cos(q) - np.sin(q)
    vd = u[..., 1 + direction] / u[..., 0]
    return vd * entropy_function(eq, u)


def entropy_quantities(eq: EquationDescriptor, u):
    """Return ``(S, w, F, psi)`` with ``F`` and ``psi`` stacked per direction."""
    u = _as_state(u)
    S = entropy_function(eq, u)
    w = entropy_vars(eq, u)
    F = np.stack([entropy_flux(eq, u, d) for d in range(eq.ndims)], axis=-1)
    psi = np.stack(
        [entropy_potential(eq, u, d) for d in range(eq.ndims)], axis=-1
    )
    return S, w, F, psi


# -- entropy-conservative two-point fluxes ----------------------------------

def log_mean(a, b) -> np.ndarray:
    """Logarithmic mean ``(a - b) / (ln a - ln b)``.

    Near ``a = b`` the quotient is evaluated by the series expansion of
    Ismail and Roe to avoid 0/0.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    zeta = a / b
    f = (zeta - 1.0) / (zeta + 1.0)
    u = f * f
    near = np.abs(zeta - 1.0) < LOG_MEAN_EPS
    series = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0
    # ln(zeta) / (2 f) equals the same factor away from zeta = 1
    exact = np.log(np.where(near, 2.0, zeta)) / np.where(near, 1.0, 2.0 * f)
    return (a + b) / (2.0 * np.where(near, series, exact))


def _require_euler(eq: EquationDescriptor, kind: FluxKind):
    if not eq.is_euler:
        raise ConfigurationError(f"{kind.name} flux requires an Euler equation")


def _ec_flux_euler_ranocha(eq, ul, ur, direction):
    gamma = eq.gamma
    rho_l, rho_r = ul[..., 0], ur[..., 0]
    p_l = _euler_pressure(eq, ul)
    p_r = _euler_pressure(eq, ur)
    v_l = ul[..., 1:-1] / rho_l[..., None]
    v_r = ur[..., 1:-1] / rho_r[..., None]
    rho_ln = log_mean(rho_l, rho_r)
    # 1 / log_mean(rho/p): computed from the plain log mean of the ratios
    inv_rho_p_ln = 1.0 / log_mean(rho_l / p_l, rho_r / p_r)
    v_avg = 0.5 * (v_l + v_r)
    p_avg = 0.5 * (p_l + p_r)
    vel_dot = 0.5 * np.sum(v_l * v_r, axis=-1)
    vd_avg = v_avg[..., direction]
    f = np.empty_like(ul)
    f_rho = rho_ln * vd_avg
    f[..., 0] = f_rho
    f[..., 1:-1] = f_rho[..., None] * v_avg
    f[..., 1 + direction] += p_avg
    f[..., -1] = f_rho * (vel_dot + inv_rho_p_ln / (gamma - 1.0)) + 0.5 * (
        p_l * v_r[..., direction] + p_r * v_l[..., direction]
    )
    return f


def _ec_flux_euler_chandrashekar(eq, ul, ur, direction):
    gamma = eq.gamma
    rho_l, rho_r = ul[..., 0], ur[..., 0]
    p_l = _euler_pressure(eq, ul)
    p_r = _euler_pressure(eq, ur)
    v_l = ul[..., 1:-1] / rho_l[..., None]
    v_r = ur[..., 1:-1] / rho_r[..., None]
    beta_l = 0.5 * rho_l / p_l
    beta_r = 0.5 * rho_r / p_r
    rho_ln = log_mean(rho_l, rho_r)
    beta_ln = log_mean(beta_l, beta_r)
    rho_avg = 0.5 * (rho_l + rho_r)
    beta_avg = 0.5 * (beta_l + beta_r)
    v_avg = 0.5 * (v_l + v_r)
    kin_avg = 0.25 * (np.sum(v_l * v_l, axis=-1) + np.sum(v_r * v_r, axis=-1))
    p_eff = 0.5 * rho_avg / beta_avg
    vd_avg = v_avg[..., direction]
    f = np.empty_like(ul)
    f_rho = rho_ln * vd_avg
    f[..., 0] = f_rho
    f[..., 1:-1] = f_rho[..., None] * v_avg
    f[..., 1 + direction] += p_eff
    f_e = f_rho * (0.5 / ((gamma - 1.0) * beta_ln) - kin_avg)
    f_e = f_e + np.sum(f[..., 1:-1] * v_avg, axis=-1)
    f[..., -1] = f_e
    return f


def ec_two_point_flux(eq: EquationDescriptor, kind: FluxKind, u_l, u_r,
                      direction: int = 0) -> np.ndarray:
    """Symmetric, consistent, entropy-conservative volume flux."""
    u_l, u_r = np.broadcast_arrays(_as_state(u_l), _as_state(u_r))
    _check_direction(eq, direction)
    if kind is FluxKind.Central:
        return 0.5 * (physical_flux(eq, u_l, direction)
                      + physical_flux(eq, u_r, direction))
    if kind is FluxKind.EC_Burgers:
        if eq.eq_code != EQ_BURGERS:
            raise ConfigurationError("EC_Burgers flux requires burgers1d")
        a, b = u_l[..., 0], u_r[..., 0]
        return ((a * a + a * b + b * b) / 6.0)[..., None]
    if kind is FluxKind.EC_KPP:
        if eq.eq_code != EQ_KPP:
            raise ConfigurationError("EC_KPP flux requires kpp2d")
        a, b = u_l[..., 0], u_r[..., 0]
        db = b - a
        tiny = np.abs(db) <= KPP_EC_FALLBACK
        safe = np.where(tiny, 1.0, db)
        if direction == 0:
            ec = (np.cos(a) - np.cos(b)) / safe
            central = 0.5 * (np.sin(a) + np.sin(b))
        else:
            ec = (np.sin(b) - np.sin(a)) / safe
            central = 0.5 * (np.cos(a) + np.cos(b))
        return np.where(tiny, central, ec)[..., None]
    if kind is FluxKind.EC_Ranocha:
        _require_euler(eq, kind)
        check_admissible(eq, u_l)
        check_admissible(eq, u_r)
        return _ec_flux_euler_ranocha(eq, u_l, u_r, direction)
    if kind is FluxKind.EC_Chandrashekar:
        _require_euler(eq, kind)
        check_admissible(eq, u_l)
        check_admissible(eq, u_r)
        return _ec_flux_euler_chandrashekar(eq, u_l, u_r, direction)
    raise ConfigurationError(f"{kind.name} is not a volume flux kind")


# -- interface (surface) fluxes ---------------------------------------------

def _flux_hll_davis(eq, ul, ur, direction):
    rho_l, rho_r = ul[..., 0], ur[..., 0]
    vn_l = ul[..., 1 + direction] / rho_l
    vn_r = ur[..., 1 + direction] / rho_r
    c_l = sound_speed(eq, ul)
    c_r = sound_speed(eq, ur)
    s_l = np.minimum(vn_l - c_l, vn_r - c_r)
    s_r = np.maximum(vn_l + c_l, vn_r + c_r)
    fl = physical_flux(eq, ul, direction)
    fr = physical_flux(eq, ur, direction)
    denom = (s_r - s_l)[..., None]
    fmid = (s_r[..., None] * fl - s_l[..., None] * fr
            + (s_l * s_r)[..., None] * (ur - ul)) / denom
    f = np.where((s_l >= 0.0)[..., None], fl, fmid)
    f = np.where((s_r <= 0.0)[..., None], fr, f)
    return f


def _flux_hllc(eq, ul, ur, direction):
    """HLLC flux with Davis wave-speed estimates (Toro's formulation)."""
    rho_l, rho_r = ul[..., 0], ur[..., 0]
    p_l = _euler_pressure(eq, ul)
    p_r = _euler_pressure(eq, ur)
    vn_l = ul[..., 1 + direction] / rho_l
    vn_r = ur[..., 1 + direction] / rho_r
    c_l = sound_speed(eq, ul)
    c_r = sound_speed(eq, ur)
    s_l = np.minimum(vn_l - c_l, vn_r - c_r)
    s_r = np.maximum(vn_l + c_l, vn_r + c_r)
    num = p_r - p_l + rho_l * vn_l * (s_l - vn_l) - rho_r * vn_r * (s_r - vn_r)
    den = rho_l * (s_l - vn_l) - rho_r * (s_r - vn_r)
    s_star = num / den
    fl = physical_flux(eq, ul, direction)
    fr = physical_flux(eq, ur, direction)

    def star_flux(u, f, rho, vn, p, s):
        fac = rho * (s - vn) / (s - s_star)
        ustar = u * (fac / rho)[..., None]
        ustar[..., 1 + direction] = fac * s_star
        ustar[..., -1] = fac * (
            u[..., -1] / rho + (s_star - vn) * (s_star + p / (rho * (s - vn)))
        )
        return f + s[..., None] * (ustar - u)

    f_star_l = star_flux(ul, fl, rho_l, vn_l, p_l, s_l)
    f_star_r = star_flux(ur, fr, rho_r, vn_r, p_r, s_r)
    f = np.where((s_star >= 0.0)[..., None], f_star_l, f_star_r)
    f = np.where((s_l >= 0.0)[..., None], fl, f)
    f = np.where((s_r <= 0.0)[..., None], fr, f)
    return f


def _flux_godunov_burgers(ul, ur):
    a, b = ul[..., 0], ur[..., 0]
    fl = 0.5 * a * a
    fr = 0.5 * b * b
    rarefaction = np.where((a <= 0.0) & (0.0 <= b), 0.0, np.minimum(fl, fr))
    return np.where(a <= b, rarefaction, np.maximum(fl, fr))[..., None]


def _rusanov_speed(eq: EquationDescriptor, u_l, u_r, direction: int):
    """Local dissipation speed of the Rusanov flux.

    Same as :func:`max_wave_speed` except for the non-convex KPP fluxes,
    where the sharp directional estimate ``max(|f_d'(u_l)|, |f_d'(u_r)|)``
    is used instead of the global unit bound (which over-dissipates near
    the flux extrema and smears the composite-wave structure).
    """
    if eq.eq_code == EQ_KPP:
        fp = np.cos if direction == 0 else np.sin
        return np.maximum(np.abs(fp(u_l[..., 0])), np.abs(fp(u_r[..., 0])))
    return max_wave_speed(eq, u_l, u_r, direction)


def surface_flux(eq: EquationDescriptor, kind: FluxKind, u_l, u_r,
                 direction: int = 0) -> np.ndarray:
    """Numerical interface flux between a left and right trace state."""
    u_l, u_r = np.broadcast_arrays(_as_state(u_l), _as_state(u_r))
    _check_direction(eq, direction)
    if kind.is_entropy_conservative or kind is FluxKind.Central:
        return ec_two_point_flux(eq, kind, u_l, u_r, direction)
    if kind is FluxKind.Rusanov:
        lam = _rusanov_speed(eq, u_l, u_r, direction)
        fl = physical_flux(eq, u_l, direction)
        fr = physical_flux(eq, u_r, direction)
        return 0.5 * (fl + fr) - 0.5 * lam[..., None] * (u_r - u_l)
    if kind is FluxKind.GodunovBurgers:
        if eq.eq_code != EQ_BURGERS:
            raise ConfigurationError("GodunovBurgers flux requires burgers1d")
        return _flux_godunov_burgers(u_l, u_r)
    if kind is FluxKind.HLL_Davis:
        _require_euler(eq, kind)
        check_admissible(eq, u_l)
        check_admissible(eq, u_r)
        return _flux_hll_davis(eq, u_l, u_r, direction)
    if kind is FluxKind.HLLC:
        _require_euler(eq, kind)
        check_admissible(eq, u_l)
        check_admissible(eq, u_r)
        return _flux_hllc(eq, u_l, u_r, direction)
    raise ConfigurationError(f"unsupported surface flux kind {kind.name}")
