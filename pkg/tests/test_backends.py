"""Cross-checks between the compiled kernel core and the NumPy fallback."""

import numpy as np
import pytest

from conftest import ALL_EQUATIONS, EC_VOLUME_KINDS, random_element_states
from dgadapt.backend import available_backends, get_kernels
from dgadapt.equations import FLUX_CODES, AdmissibilityError, FluxKind
from dgadapt.indicators import KAPPA, indicator_threshold
from dgadapt.operators import build_operators

pytestmark = pytest.mark.skipif(
    "compiled" not in available_backends(),
    reason="compiled kernel core not built")


@pytest.fixture(scope="module")
def backends():
    return get_kernels("compiled"), get_kernels("python")


SURFACE_BY_EQ = {
    "burgers1d": [FluxKind.Central, FluxKind.Rusanov, FluxKind.GodunovBurgers,
                  FluxKind.EC_Burgers],
    "kpp2d": [FluxKind.Central, FluxKind.Rusanov, FluxKind.EC_KPP],
    "euler1d": [FluxKind.Central, FluxKind.Rusanov, FluxKind.HLL_Davis,
                FluxKind.HLLC, FluxKind.EC_Ranocha, FluxKind.EC_Chandrashekar],
    "euler2d": [FluxKind.Central, FluxKind.Rusanov, FluxKind.HLL_Davis,
                FluxKind.HLLC, FluxKind.EC_Ranocha, FluxKind.EC_Chandrashekar],
}


@pytest.mark.parametrize("eq", ALL_EQUATIONS, ids=lambda e: e.id)
def test_point_fluxes_agree(eq, backends, rng):
    fast, ref = backends
    ul = random_element_states(eq, 1, 4, rng).reshape(-1, eq.nvars)
    ur = random_element_states(eq, 1, 4, rng).reshape(-1, eq.nvars)
    # include coincident pairs (consistency paths, KPP fallback branch)
    ur[::3] = ul[::3]
    for kind in SURFACE_BY_EQ[eq.id]:
        for d in range(eq.ndims):
            out_fast = np.empty_like(ul)
            out_ref = np.empty_like(ul)
            fast.surface_flux_batch(eq.eq_code, eq.gamma, FLUX_CODES[kind],
                                    ul, ur, d, out_fast)
            ref.surface_flux_batch(eq.eq_code, eq.gamma, FLUX_CODES[kind],
                                   ul, ur, d, out_ref)
            np.testing.assert_allclose(out_fast, out_ref, rtol=1e-12,
                                       atol=1e-13, err_msg=f"{kind} d={d}")


@pytest.mark.parametrize("eq", ALL_EQUATIONS, ids=lambda e: e.id)
@pytest.mark.parametrize("p", [1, 3, 5])
def test_volume_kernels_agree(eq, p, backends, rng):
    fast, ref = backends
    ne = 7
    u = random_element_states(eq, ne, p, rng)
    idx = np.ascontiguousarray(np.arange(ne, dtype=np.int64)[1::2])
    metric = rng.uniform(0.5, 3.0, size=eq.ndims)
    ops = build_operators(p)
    scale = rng.uniform(0.1, 0.9, size=idx.size)
    for name, args in (
        ("wf", None),
        ("fd", None),
        ("fd_scaled", scale),
        ("fv", None),
        ("fv_scaled", scale),
    ):
        r_fast = np.zeros_like(u)
        r_ref = np.zeros_like(u)
        if name == "wf":
            n1 = fast.wf_volume(eq.eq_code, eq.gamma, u, idx, p, eq.ndims,
                                ops.Dhat, metric, r_fast)
            n2 = ref.wf_volume(eq.eq_code, eq.gamma, u, idx, p, eq.ndims,
                               ops.Dhat, metric, r_ref)
        elif name.startswith("fd"):
            code = FLUX_CODES[EC_VOLUME_KINDS[eq.id]]
            n1 = fast.fd_volume(eq.eq_code, eq.gamma, code, u, idx, p,
                                eq.ndims, ops.D, metric, args, r_fast)
            n2 = ref.fd_volume(eq.eq_code, eq.gamma, code, u, idx, p,
                               eq.ndims, ops.D, metric, args, r_ref)
        else:
            code = FLUX_CODES[FluxKind.Rusanov]
            n1 = fast.fv_volume(eq.eq_code, eq.gamma, code, u, idx, p,
                                eq.ndims, ops.weights, metric, args, r_fast)
            n2 = ref.fv_volume(eq.eq_code, eq.gamma, code, u, idx, p,
                               eq.ndims, ops.weights, metric, args, r_ref)
        assert n1 == n2
        scale_mag = max(1.0, np.max(np.abs(r_ref)))
        assert np.max(np.abs(r_fast - r_ref)) / scale_mag < 1e-12, name
        # untouched elements stay zero
        mask = np.ones(ne, dtype=bool)
        mask[idx] = False
        assert np.all(r_fast[mask] == 0.0)


@pytest.mark.parametrize("eq", ALL_EQUATIONS, ids=lambda e: e.id)
def test_entropy_tallies_agree(eq, backends, rng):
    fast, ref = backends
    p = 4
    ne = 6
    u = random_element_states(eq, ne, p, rng)
    rate = rng.standard_normal(u.shape)
    ops = build_operators(p)
    w = ops.weights
    wbar = w if eq.ndims == 1 else np.kron(w, w)
    metric = rng.uniform(0.5, 3.0, size=eq.ndims)
    a1, a2 = np.empty(ne), np.empty(ne)
    fast.entropy_dot(eq.eq_code, eq.gamma, u, rate, wbar, a1)
    ref.entropy_dot(eq.eq_code, eq.gamma, u, rate, wbar, a2)
    np.testing.assert_allclose(a1, a2, rtol=1e-12, atol=1e-13)
    fast.psi_telescope(eq.eq_code, eq.gamma, u, p, eq.ndims, w, metric, a1)
    ref.psi_telescope(eq.eq_code, eq.gamma, u, p, eq.ndims, w, metric, a2)
    np.testing.assert_allclose(a1, a2, rtol=1e-12, atol=1e-13)
    fast.entropy_sum(eq.eq_code, eq.gamma, u, wbar, a1)
    ref.entropy_sum(eq.eq_code, eq.gamma, u, wbar, a2)
    np.testing.assert_allclose(a1, a2, rtol=1e-12, atol=1e-13)
    r1 = fast.min_dx_over_lambda(eq.eq_code, eq.gamma, u,
                                 np.full(eq.ndims, 0.3))
    r2 = ref.min_dx_over_lambda(eq.eq_code, eq.gamma, u,
                                np.full(eq.ndims, 0.3))
    assert r1 == pytest.approx(r2, rel=1e-13)


@pytest.mark.parametrize("ndims", [1, 2])
def test_modal_beta_agrees(ndims, backends, rng):
    fast, ref = backends
    p = 4
    nn = (p + 1) ** ndims
    v = rng.standard_normal((30, nn))
    v[0] = 1.0   # constant
    v[1] = 0.0   # zero field
    ops = build_operators(p)
    b1, b2 = np.empty(30), np.empty(30)
    fast.modal_beta(v, ops.Vinv, p, ndims, indicator_threshold(p), KAPPA,
                    0.001, 0.7, b1)
    ref.modal_beta(v, ops.Vinv, p, ndims, indicator_threshold(p), KAPPA,
                   0.001, 0.7, b2)
    np.testing.assert_allclose(b1, b2, rtol=1e-12, atol=0)
    assert b1[0] == 0.0 and b1[1] == 0.0


def test_admissibility_error_carries_location(backends):
    fast, _ = backends
    from dgadapt.equations import equation
    eq = equation("euler1d")
    u = np.tile([1.0, 0.0, 2.5], (3, 4, 1))
    u[2, 1, 0] = -1.0  # negative density at element 2, node 1
    rate = np.zeros_like(u)
    ops = build_operators(3)
    idx = np.arange(3, dtype=np.int64)
    with pytest.raises(AdmissibilityError) as err:
        fast.wf_volume(eq.eq_code, eq.gamma, u, idx, 3, 1, ops.Dhat,
                       np.array([1.0]), rate)
    assert err.value.element == 2
    assert err.value.node == 1


def test_bench_flux_agreement(backends, rng):
    fast, ref = backends
    from dgadapt.equations import equation, primitive_to_conserved
    eq = equation("euler2d")
    prim = np.tile([1.0, 0.0, 0.0, 1e4], (100, 1))
    ul = primitive_to_conserved(eq, prim)
    prim[:, -1] = 1.0
    ur = primitive_to_conserved(eq, prim)
    for code in (-1, FLUX_CODES[FluxKind.EC_Ranocha]):
        t1, n1 = fast.bench_flux(eq.eq_code, eq.gamma, code, ul, ur, 0, 3)
        t2, n2 = ref.bench_flux(eq.eq_code, eq.gamma, code, ul, ur, 0, 3)
        assert n1 == n2
        assert t1 > 0 and t2 > 0
