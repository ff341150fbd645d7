import numpy as np
import pytest

from dgadapt import equations as eqs
from dgadapt.equations import primitive_to_conserved


def random_states(eq, n, rng, spread=1.0):
    """Random admissible states, mildly varying (factor `spread` widens)."""
    if eq.id == "burgers1d":
        return rng.uniform(-2.0 * spread, 2.0 * spread, size=(n, 1))
    if eq.id == "kpp2d":
        return rng.uniform(-np.pi * spread, 2.0 * np.pi * spread, size=(n, 1))
    prim = np.empty((n, eq.nvars))
    prim[:, 0] = rng.uniform(0.5, 1.5, size=n) ** spread
    prim[:, 1:-1] = rng.uniform(-spread, spread, size=(n, eq.ndims))
    prim[:, -1] = rng.uniform(0.5, 2.0, size=n) ** spread
    return primitive_to_conserved(eq, prim)


def random_element_states(eq, nelem, p, rng, spread=1.0):
    """Random admissible nodal data shaped (nelem, (p+1)^d, nvars)."""
    nnodes = (p + 1) ** eq.ndims
    return random_states(eq, nelem * nnodes, rng, spread).reshape(
        nelem, nnodes, eq.nvars)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ALL_EQUATIONS = [eqs.equation("burgers1d"), eqs.equation("kpp2d"),
                 eqs.equation("euler1d"), eqs.equation("euler2d")]

EC_VOLUME_KINDS = {
    "burgers1d": eqs.FluxKind.EC_Burgers,
    "kpp2d": eqs.FluxKind.EC_KPP,
    "euler1d": eqs.FluxKind.EC_Ranocha,
    "euler2d": eqs.FluxKind.EC_Ranocha,
}

DISSIPATIVE_KINDS = {
    "burgers1d": eqs.FluxKind.GodunovBurgers,
    "kpp2d": eqs.FluxKind.Rusanov,
    "euler1d": eqs.FluxKind.Rusanov,
    "euler2d": eqs.FluxKind.HLLC,
}
