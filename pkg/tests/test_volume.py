import numpy as np
import pytest

from conftest import ALL_EQUATIONS, EC_VOLUME_KINDS, random_element_states
from dgadapt import equations as eqs
from dgadapt.equations import ConfigurationError, FluxKind, equation
from dgadapt.operators import build_operators
from dgadapt.volume import (
    ElementView,
    blended_vt,
    fd_flux_evals,
    flux_differencing_vt,
    subcell_fv_vt,
    weak_form_vt,
    wf_flux_evals,
)


def burgers_elem(values, metric=1.0):
    u = np.asarray(values, dtype=float)[:, None]
    return ElementView(u=u, metric=(metric,), ndims=1)


def test_weak_form_hand_value_p1():
    # nodal fluxes (0, 1) on the reference element (J = 1 means dx = 2)
    ops = build_operators(1)
    eq = equation("burgers1d")
    elem = burgers_elem([0.0, np.sqrt(2.0)])
    out = weak_form_vt(elem, ops, eq)
    np.testing.assert_allclose(out.rate[:, 0], [-0.5, 0.5], atol=1e-14)
    assert out.analytical_evals == 2


def test_flux_differencing_hand_value_p1():
    ops = build_operators(1)
    eq = equation("burgers1d")
    elem = burgers_elem([0.0, 2.0])
    out = flux_differencing_vt(elem, ops, eq, FluxKind.EC_Burgers)
    np.testing.assert_allclose(out.rate[:, 0], [-2.0 / 3.0, 2.0 / 3.0],
                               atol=1e-14)
    assert out.two_point_evals == 1


def test_subcell_fv_hand_value_p2():
    # interior Rusanov fluxes for u = (0, 1, 2): -1/4 and +1/4
    ops = build_operators(2)
    eq = equation("burgers1d")
    elem = burgers_elem([0.0, 1.0, 2.0])
    out = subcell_fv_vt(elem, ops, eq, FluxKind.Rusanov)
    fb0, fb1 = -0.25, 0.25
    w = ops.weights
    expected = [-(fb0 - 0.0) / w[0], -(fb1 - fb0) / w[1], -(0.0 - fb1) / w[2]]
    np.testing.assert_allclose(out.rate[:, 0], expected, atol=1e-14)
    assert out.fv_evals == 2


@pytest.mark.parametrize("eq", ALL_EQUATIONS, ids=lambda e: e.id)
@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_weak_form_equals_central_flux_differencing(eq, p, rng):
    ops = build_operators(p)
    metric = tuple(rng.uniform(0.5, 4.0, size=eq.ndims))
    for _ in range(20):
        u = random_element_states(eq, 1, p, rng)[0]
        elem = ElementView(u=u, metric=metric, ndims=eq.ndims)
        wf = weak_form_vt(elem, ops, eq).rate
        fd = flux_differencing_vt(elem, ops, eq, FluxKind.Central).rate
        scale = max(1.0, np.max(np.abs(wf)))
        assert np.max(np.abs(wf - fd)) / scale < 1e-12


@pytest.mark.parametrize("eq", ALL_EQUATIONS, ids=lambda e: e.id)
def test_kernels_agree_on_constant_states(eq, rng):
    # all volume kernels reduce to the same boundary-node term on constants
    p = 3
    ops = build_operators(p)
    u0 = random_element_states(eq, 1, p, rng)[0][0]
    u = np.tile(u0, ((p + 1) ** eq.ndims, 1))
    elem = ElementView(u=u, metric=(1.0,) * eq.ndims, ndims=eq.ndims)
    wf = weak_form_vt(elem, ops, eq).rate
    fd = flux_differencing_vt(elem, ops, eq, EC_VOLUME_KINDS[eq.id]).rate
    fv = subcell_fv_vt(elem, ops, eq, FluxKind.Rusanov).rate
    np.testing.assert_allclose(fd, wf, atol=1e-12)
    np.testing.assert_allclose(fv, wf, atol=1e-12)


@pytest.mark.parametrize("eq", ALL_EQUATIONS, ids=lambda e: e.id)
@pytest.mark.parametrize("p", [2, 4])
def test_volume_kernels_are_conservative(eq, p, rng):
    # quadrature-weighted kernel sums vanish: flux balance lives on the faces
    ops = build_operators(p)
    w = ops.weights
    wbar = w if eq.ndims == 1 else np.kron(w, w)
    metric = tuple(rng.uniform(0.5, 3.0, size=eq.ndims))
    for _ in range(10):
        u = random_element_states(eq, 1, p, rng)[0]
        elem = ElementView(u=u, metric=metric, ndims=eq.ndims)
        for contrib in (
            weak_form_vt(elem, ops, eq),
            flux_differencing_vt(elem, ops, eq, EC_VOLUME_KINDS[eq.id]),
            subcell_fv_vt(elem, ops, eq),
        ):
            total = np.einsum("j,jv->v", wbar, contrib.rate)
            scale = max(1.0, np.max(np.abs(contrib.rate)))
            assert np.max(np.abs(total)) / scale < 1e-13


def test_blend_limits_and_convexity(rng):
    eq = equation("euler1d")
    p = 3
    ops = build_operators(p)
    u = random_element_states(eq, 1, p, rng)[0]
    elem = ElementView(u=u, metric=(2.0,), ndims=1)
    fd = flux_differencing_vt(elem, ops, eq, FluxKind.EC_Ranocha)
    fv = subcell_fv_vt(elem, ops, eq)
    b0 = blended_vt(elem, ops, eq, FluxKind.EC_Ranocha, FluxKind.Rusanov, 0.0)
    np.testing.assert_array_equal(b0.rate, fd.rate)
    assert b0.fv_evals == 0
    b1 = blended_vt(elem, ops, eq, FluxKind.EC_Ranocha, FluxKind.Rusanov, 1.0)
    np.testing.assert_array_equal(b1.rate, fv.rate)
    assert b1.two_point_evals == 0
    bh = blended_vt(elem, ops, eq, FluxKind.EC_Ranocha, FluxKind.Rusanov, 0.5)
    np.testing.assert_allclose(bh.rate, 0.5 * fd.rate + 0.5 * fv.rate,
                               rtol=1e-14, atol=1e-14)
    with pytest.raises(ConfigurationError):
        blended_vt(elem, ops, eq, FluxKind.EC_Ranocha, FluxKind.Rusanov, 1.5)


@pytest.mark.parametrize("p", [2, 3, 4])
@pytest.mark.parametrize("eq", [equation("burgers1d"), equation("euler2d")],
                         ids=lambda e: e.id)
def test_flux_eval_counters_match_formulas(eq, p, rng):
    ops = build_operators(p)
    u = random_element_states(eq, 1, p, rng)[0]
    elem = ElementView(u=u, metric=(1.0,) * eq.ndims, ndims=eq.ndims)
    d = eq.ndims
    wf = weak_form_vt(elem, ops, eq)
    assert wf.analytical_evals == wf_flux_evals(p, d) == d * (p + 1) ** d
    fd = flux_differencing_vt(elem, ops, eq, EC_VOLUME_KINDS[eq.id])
    assert fd.two_point_evals == fd_flux_evals(p, d) == d * p * (p + 1) ** d // 2
    fv = subcell_fv_vt(elem, ops, eq)
    assert fv.fv_evals == d * p * (p + 1) ** (d - 1)


def test_fd_requires_volume_flux_kind(rng):
    eq = equation("euler1d")
    ops = build_operators(2)
    u = random_element_states(eq, 1, 2, rng)[0]
    elem = ElementView(u=u, metric=(1.0,), ndims=1)
    with pytest.raises(ConfigurationError):
        flux_differencing_vt(elem, ops, eq, FluxKind.HLLC)
    with pytest.raises(ConfigurationError):
        subcell_fv_vt(elem, ops, eq, FluxKind.EC_Ranocha)
