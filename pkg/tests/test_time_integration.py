import numpy as np
import pytest

from dgadapt.equations import ConfigurationError, FluxKind, equation, primitive_to_conserved
from dgadapt.semidiscretization import Mesh, SemidiscretizationConfig, SolutionField, project_function
from dgadapt.time_integration import (
    LSRK54_CARPENTER_KENNEDY,
    SSPRK54_RUUTH,
    StepController,
    cfl_timestep,
    integrate,
    rk_method,
    rk_step,
)
from dgadapt.testcases import build_config, initial_state
from dgadapt.testcases import testcase as get_testcase
from dgadapt.volume import VolumeSchemeMode

METHODS = [LSRK54_CARPENTER_KENNEDY, SSPRK54_RUUTH]


@pytest.mark.parametrize("method", METHODS, ids=lambda m: m.id)
def test_zero_rhs_keeps_state(method):
    u = np.linspace(0.0, 1.0, 12).reshape(3, 2, 2)
    rhs = lambda state, t: (np.zeros_like(state), None)
    unew, reports = rk_step(method, rhs, u, 0.0, 0.25)
    # Shu-Osher convex weights reproduce the state to roundoff
    np.testing.assert_allclose(unew, u, rtol=1e-13, atol=1e-15)
    assert len(reports) == 5


@pytest.mark.parametrize("method", METHODS, ids=lambda m: m.id)
def test_observed_order_on_linear_ode(method):
    # u' = -u, u(0) = 1, exact e^{-t}
    rhs = lambda state, t: (-state, None)
    errors = []
    for n in (8, 16, 32, 64):
        dt = 1.0 / n
        u = np.array([1.0])
        for k in range(n):
            u, _ = rk_step(method, rhs, u, k * dt, dt)
        errors.append(abs(u[0] - np.exp(-1.0)))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert orders[-1] >= 3.9
    assert orders[-1] <= 4.6


def test_rk_method_lookup():
    assert rk_method("SSPRK54_Ruuth") is SSPRK54_RUUTH
    with pytest.raises(ConfigurationError):
        rk_method("RK4")


def test_cfl_timestep_formula():
    eq = equation("burgers1d")
    mesh = Mesh(cells=(8,), bounds=((0.0, 0.8),), periodic=(True,))
    config = SemidiscretizationConfig(eq=eq, mesh=mesh, p=3,
                                      surface_kind=FluxKind.Rusanov,
                                      volume_mode=VolumeSchemeMode.WF)
    u = np.full((8, 4, 1), 2.0)
    dt = cfl_timestep(u, mesh, eq, 3, 0.5)
    assert dt == pytest.approx(0.5 * 0.25 * 0.1 / 2.0)
    with pytest.raises(ConfigurationError):
        cfl_timestep(u, mesh, eq, 3, 0.0)


def test_cfl_uses_sound_speed_for_stationary_euler():
    eq = equation("euler1d")
    mesh = Mesh(cells=(4,), bounds=((0.0, 0.4),), periodic=(True,))
    u0 = primitive_to_conserved(eq, np.array([1.0, 0.0, 1.0]))
    u = np.tile(u0, (4, 4, 1))
    dt = cfl_timestep(u, mesh, eq, 3, 1.0)
    assert dt == pytest.approx(0.25 * 0.1 / np.sqrt(1.4))


def test_zero_wave_speed_caps_step_at_final_time():
    tc = get_testcase("burgers_sine")
    config = build_config(tc, cells=(8,))
    state = SolutionField(data=np.zeros((8, 4, 1)), t=0.0)
    controller = StepController(t_final=0.5, cfl=0.9)
    result = integrate(state, config, SSPRK54_RUUTH, controller)
    assert result.completed
    assert result.n_steps == 1
    assert result.state.t == pytest.approx(0.5)


def test_controller_validation():
    with pytest.raises(ConfigurationError):
        StepController(t_final=1.0)
    with pytest.raises(ConfigurationError):
        StepController(t_final=1.0, cfl=0.5, dt=0.1)
    with pytest.raises(ConfigurationError):
        StepController(t_final=1.0, cfl=-0.1)


def test_callbacks_observe_monotone_time_and_final_time_is_hit():
    tc = get_testcase("density_wave_1d")
    config = build_config(tc, cells=(8,))
    state = initial_state(tc, config)
    times = []
    cb = lambda step, t, field, reports: times.append(t)
    controller = StepController(t_final=0.05, cfl=0.6)
    result = integrate(state, config, LSRK54_CARPENTER_KENNEDY, controller,
                       callbacks=[cb])
    assert result.completed
    assert np.all(np.diff(times) > 0.0)
    assert times[-1] == pytest.approx(0.05, abs=1e-13)


def test_fixed_dt_matches_cfl_run_with_identical_steps():
    # KPP has unit wave speed, so the CFL step is state-independent
    tc = get_testcase("kpp")
    config = build_config(tc, cells=(8, 8), p=2)
    state = initial_state(tc, config)
    dt = cfl_timestep(state.data, config.mesh, config.eq, 2, 0.5)
    r_cfl = integrate(state, config, SSPRK54_RUUTH,
                      StepController(t_final=4 * dt, cfl=0.5))
    r_fix = integrate(state, config, SSPRK54_RUUTH,
                      StepController(t_final=4 * dt, dt=dt))
    np.testing.assert_allclose(r_cfl.state.data, r_fix.state.data,
                               rtol=1e-14, atol=1e-14)


def test_divergence_detected_with_crash_time():
    # a timestep far above the stability limit blows the density wave up
    tc = get_testcase("density_wave_1d")
    config = build_config(tc, cells=(8,))
    state = initial_state(tc, config)
    controller = StepController(t_final=10.0, dt=0.5)
    result = integrate(state, config, LSRK54_CARPENTER_KENNEDY, controller)
    assert result.status == "diverged"
    assert result.t_crash is not None and np.isfinite(result.t_crash)
    assert result.t_crash < 10.0


def test_max_steps_guard():
    tc = get_testcase("density_wave_1d")
    config = build_config(tc, cells=(8,))
    state = initial_state(tc, config)
    controller = StepController(t_final=2.0, cfl=0.5, max_steps=3)
    result = integrate(state, config, LSRK54_CARPENTER_KENNEDY, controller)
    assert result.status == "max_steps"
    assert result.n_steps == 3


def test_counters_aggregate_over_stages():
    tc = get_testcase("density_wave_1d")
    config = build_config(tc, cells=(8,), volume_mode=VolumeSchemeMode.FD)
    state = initial_state(tc, config)
    controller = StepController(t_final=1e-3, dt=5e-4)
    result = integrate(state, config, LSRK54_CARPENTER_KENNEDY, controller)
    assert result.counters.n_stages == 10
    # FD on all 8 elements, every stage: (p/2)(p+1) per element, p=3
    assert result.counters.two_point_evals == 10 * 8 * 6
