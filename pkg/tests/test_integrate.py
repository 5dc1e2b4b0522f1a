import io
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from evslv import ContractViolation, IntegratorConfig, ModelSpec3, NumericalBlowup, ev_first_integral, simulate, step
from evslv.integrate import Trajectory

from conftest import X_BASE


def test_zero_step_is_identity(base_pos):
    assert np.array_equal(step(base_pos, X_BASE, 0.0), np.array(X_BASE))


def test_single_step_close_to_euler_predictor(base_pos):
    out = step(base_pos, X_BASE, 0.01)
    np.testing.assert_allclose(out, [0.09998, 0.10008, 0.09997], rtol=0, atol=1e-7)


def test_single_step_against_tight_reference(base_pos):
    ref = solve_ivp(
        lambda t, x: x * (base_pos.r + base_pos.A @ x), (0, 0.01), X_BASE, method="DOP853", rtol=1e-13, atol=1e-16
    )
    np.testing.assert_allclose(step(base_pos, X_BASE, 0.01), ref.y[:, -1], rtol=0, atol=1e-14)


@pytest.mark.parametrize("i", [0, 1, 2])
def test_step_keeps_zero_component(base_pos, i):
    x = np.array([0.3, 0.2, 0.4])
    x[i] = 0.0
    assert step(base_pos, x, 0.05)[i] == 0.0


def test_fixed_point_is_stationary(base_pos):
    x0 = (0.375, 0.125, 0.125)
    traj = simulate(base_pos, x0, IntegratorConfig(horizon=100.0))
    assert np.abs(traj.states - np.array(x0)).max() < 1e-6


def test_ev_subsystem_stays_on_plane(base_pos):
    traj = simulate(base_pos, (0.1, 0.1, 0.0), IntegratorConfig(horizon=50.0))
    assert np.all(traj.states[:, 2] == 0.0)
    assert traj.events == []  # starting below threshold is not a crossing


def test_first_integral_at_fixed_point(base_pos):
    # 0.7/7 - 0.1 ln(1/7) + 0.3/3 - 0.1 ln(1/3)
    assert ev_first_integral(base_pos, 1 / 3, 1 / 7) == pytest.approx(0.504452, abs=1e-6)


def test_first_integral_conserved_symbolically():
    E, V, rE, rV, a12, a21 = sp.symbols("E V r_E r_V a12 a21")
    H = a12 * V + rE * sp.log(V) - a21 * E - rV * sp.log(E)
    dE = E * (rE + a12 * V)
    dV = V * (rV + a21 * E)
    assert sp.simplify(sp.diff(H, E) * dE + sp.diff(H, V) * dV) == 0


@given(st.floats(0.05, 2.0), st.floats(0.05, 2.0))
def test_first_integral_finite_difference(E, V):
    spec = ModelSpec3.baseline(0.1)
    f = np.array([E * (spec.r[0] + spec.A[0, 1] * V), V * (spec.r[1] + spec.A[1, 0] * E)])
    h = 1e-5  # balances truncation against cancellation in H
    fwd = ev_first_integral(spec, E + h * f[0], V + h * f[1])
    bwd = ev_first_integral(spec, E - h * f[0], V - h * f[1])
    assert abs((fwd - bwd) / (2 * h)) < 1e-10


def test_first_integral_minimum_at_fixed_point(base_pos):
    grid = np.linspace(0.05, 1.0, 96)
    H = np.array([[ev_first_integral(base_pos, e, v) for v in grid] for e in grid])
    i, j = np.unravel_index(np.argmin(H), H.shape)
    # the grid minimizer is the grid point nearest (1/3, 1/7)
    assert abs(grid[i] - 1 / 3) <= 0.01 and abs(grid[j] - 1 / 7) <= 0.01
    assert H.min() >= ev_first_integral(base_pos, 1 / 3, 1 / 7)


def test_first_integral_domain(base_pos):
    with pytest.raises(ContractViolation):
        ev_first_integral(base_pos, 0.0, 0.1)


def test_simulate_is_deterministic(base_pos):
    cfg = IntegratorConfig(horizon=50.0)
    a = simulate(base_pos, X_BASE, cfg)
    b = simulate(base_pos, X_BASE, cfg)
    assert np.array_equal(a.times, b.times) and np.array_equal(a.states, b.states)


def test_recording_layout(base_pos):
    traj = simulate(base_pos, X_BASE, IntegratorConfig(horizon=1.0, dt=0.01, record_stride=10))
    np.testing.assert_allclose(traj.times, np.arange(11) * 0.1, atol=1e-12)
    assert np.all(np.diff(traj.times) > 0)
    assert traj.states.shape == (11, 3)


def test_horizon_not_multiple_of_dt(base_pos):
    traj = simulate(base_pos, X_BASE, IntegratorConfig(horizon=1.005, dt=0.01, record_stride=1))
    assert traj.times[-1] == 1.005
    assert np.all(np.diff(traj.times) > 0)


def test_extinction_event_is_annotation_not_termination(base_neg):
    traj = simulate(base_neg, X_BASE, IntegratorConfig())
    assert traj.times[-1] == 500.0
    s_events = [e for e in traj.events if e[1] == 2]
    assert len(s_events) == 1 and s_events[0][2] == "extinction-crossed"
    assert 0 < s_events[0][0] < 500


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(0.02, 1.0), min_size=3, max_size=3), st.sampled_from([0.01, 0.05]))
def test_positivity_persists(x0, dt):
    # large starts can diverge through E-S mutualism; that is a non-finite blowup, never a sign change
    spec = ModelSpec3.baseline(0.1)
    try:
        traj = simulate(spec, x0, IntegratorConfig(dt=dt, horizon=100.0))
    except NumericalBlowup as exc:
        assert exc.reason == "non-finite state"
        traj = exc.trajectory
    assert traj.states.min() > 0


def test_blowup_carries_partial_trajectory():
    spec = ModelSpec3([1.0, 1.0, 1.0], np.ones((3, 3)) - np.eye(3), enforce_template=False)
    with pytest.raises(NumericalBlowup) as exc:
        simulate(spec, (1.0, 1.0, 1.0), IntegratorConfig(horizon=10.0, record_stride=1))
    part = exc.value.trajectory
    assert 0 < exc.value.time < 10.0
    assert len(part.times) > 1 and np.all(np.isfinite(part.states))
    assert part.times[-1] < exc.value.time


def test_log_domain_agrees(base_pos):
    cfg = IntegratorConfig(horizon=50.0)
    raw = simulate(base_pos, X_BASE, cfg)
    logd = simulate(base_pos, X_BASE, IntegratorConfig(horizon=50.0, log_domain=True))
    np.testing.assert_allclose(logd.states, raw.states, rtol=1e-8)


def test_log_domain_needs_positive_start(base_pos):
    with pytest.raises(ContractViolation):
        simulate(base_pos, (0.1, 0.1, 0.0), IntegratorConfig(log_domain=True))


def test_rk45_agrees_with_rk4(base_pos):
    fixed = simulate(base_pos, X_BASE, IntegratorConfig(horizon=50.0, record_stride=100000))
    adaptive = simulate(base_pos, X_BASE, IntegratorConfig(method="rk45", horizon=50.0))
    assert adaptive.times[-1] == pytest.approx(50.0)
    np.testing.assert_allclose(adaptive.final, fixed.final, rtol=1e-7)


@pytest.mark.parametrize(
    "kwargs", [{"dt": 0.0}, {"horizon": -1.0}, {"extinction_threshold": 0.0}, {"record_stride": 0}, {"method": "euler"}, {"rtol": 0}]
)
def test_config_validation(kwargs):
    with pytest.raises(ContractViolation):
        IntegratorConfig(**kwargs)


def test_csv_full_precision(base_pos):
    traj = simulate(base_pos, X_BASE, IntegratorConfig(horizon=1.0))
    buf = io.StringIO()
    traj.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,E,V,S"
    back = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.array_equal(back[:, 1:], traj.states)


def test_csv_header_n_dim():
    traj = Trajectory(np.array([0.0]), np.ones((1, 4)), labels=("x1", "x2", "x3", "x4"))
    buf = io.StringIO()
    traj.to_csv(buf)
    assert buf.getvalue().splitlines()[0] == "t,x1,x2,x3,x4"
