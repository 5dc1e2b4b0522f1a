import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evslv import (
    IntegratorConfig,
    ModelSpec3,
    NoInteriorFixedPoint,
    classify_scenario,
    per_capita_growth,
    persistence_check,
    proposition1_bounds,
    recovery_sign,
    simulate,
    subsystem_fixed_point,
)
from evslv.integrate import Trajectory
from evslv.sustainability import EXIT_CODES, scenario_from_signs

from conftest import X_BASE, template_specs


def test_recovery_values_baseline(base_pos):
    s, fp_s = recovery_sign(base_pos, "S")
    assert s == pytest.approx(-0.05 + 0.1 / 3 + 0.1 / 7, abs=1e-15)
    assert s == pytest.approx(-0.002381, abs=1e-6)
    assert fp_s.mask_label == "EV"
    v, fp_v = recovery_sign(base_pos, "V")
    assert v == pytest.approx(0.1 - 0.3 * 0.5 + 0.1 * 1.0, abs=1e-15)
    e, fp_e = recovery_sign(base_pos, "E")
    assert e == pytest.approx(-0.1 + 0.7 * 0.5 + 0.1 * -1.0, abs=1e-15)
    assert not fp_e.in_positive_orthant


def test_baseline_is_viable(base_pos):
    report = classify_scenario(base_pos)
    assert report.signs == (1, 1, -1)
    assert report.scenario == "Viable"
    assert report.exit_code == 12
    assert any("E:" in w and "positive orthant" in w for w in report.warnings)


def test_hand_built_sustainable_spec():
    # r_S = -0.04: E = -0.1 + 0.7*0.4 - 0.1 = 0.08, V = 0.1 - 0.3*0.4 + 0.1 = 0.08, S = -0.04 + 1/30 + 1/70
    spec = ModelSpec3.baseline(0.1, r_S=-0.04)
    report = classify_scenario(spec)
    values = [e.value for e in report.recovery]
    np.testing.assert_allclose(values, [0.08, 0.08, -0.04 + 1 / 30 + 1 / 70], atol=1e-15)
    assert report.scenario == "Sustainable" and report.exit_code == 0


def test_small_social_decay_moves_vs_fixed_point():
    # r_S enters the VS equilibrium (V* = -r_S/a32), so lowering |r_S| flips the E recovery sign
    spec = ModelSpec3.baseline(0.1, r_S=-0.01)
    report = classify_scenario(spec)
    np.testing.assert_allclose(
        [e.value for e in report.recovery], [-0.1 + 0.7 * 0.1 - 0.1, 0.1 - 0.3 * 0.1 + 0.1, -0.01 + 1 / 30 + 1 / 70], atol=1e-15
    )
    assert report.scenario == "Bearable"


def test_singular_vs_subsystem_is_indeterminate(base_pos):
    spec = ModelSpec3(base_pos.r, base_pos.A, enforce_template=False).with_param("a23", 0.0).with_param("a32", 0.0)
    report = classify_scenario(spec)
    assert report.recovery[0].value is None and report.recovery[0].sign is None
    assert report.scenario == "Indeterminate" and report.exit_code == 13
    with pytest.raises(NoInteriorFixedPoint):
        recovery_sign(spec, "E")


def test_near_zero_recovery_is_indeterminate(base_pos):
    # a12 = 0.6 puts the EV equilibrium at (1/3, 1/6) where S growth is exactly 0
    spec = base_pos.with_param("a12", 0.6)
    report = classify_scenario(spec)
    assert report.recovery[2].sign is None
    assert report.scenario == "Indeterminate"


@pytest.mark.parametrize(
    "signs,label",
    [
        ((1, 1, 1), "Sustainable"),
        ((-1, 1, 1), "Bearable"),
        ((1, -1, 1), "Equitable"),
        ((1, 1, -1), "Viable"),
        ((1, -1, -1), "Unsustainable"),
        ((1, None, 1), "Indeterminate"),
    ],
)
def test_scenario_from_signs(signs, label):
    assert scenario_from_signs(signs) == label
    assert label in EXIT_CODES


def test_boundary_thresholds_baseline(base_pos):
    b_a31, b_a21, b_a23 = proposition1_bounds(base_pos)
    assert (b_a31.parameter, b_a31.branch, b_a31.relation) == ("a31", 1, "<")
    assert b_a31.threshold == pytest.approx((0.7 * 0.1 * -0.05) / 0.02, abs=1e-12)
    assert b_a31.satisfied is False
    assert (b_a21.parameter, b_a21.branch, b_a21.relation) == ("a21", 2, ">")
    assert b_a21.threshold == pytest.approx(0.28, abs=1e-12)
    assert b_a21.satisfied is False
    assert (b_a23.parameter, b_a23.branch, b_a23.relation) == ("a23", 1, ">")
    assert b_a23.threshold == pytest.approx(0.04, abs=1e-12)
    assert b_a23.satisfied is True


def test_boundary_degenerate_denominator(base_pos):
    # a13 rV - a23 rE = 0 when a23 = -a13 rV / rE ... with rE < 0 that needs a23 = 0.1*0.1/0.1
    spec = ModelSpec3(base_pos.r, base_pos.A, enforce_template=False).with_param("a23", -0.1)
    b = proposition1_bounds(spec)[0]
    assert b.degenerate and b.threshold is None and b.satisfied is None


def test_crosscheck_is_reported(base_pos):
    report = classify_scenario(base_pos)
    cc = {c["dimension"]: c for c in report.crosscheck}
    assert set(cc) == {"E", "V", "S"}
    assert cc["V"] == {
        "dimension": "V",
        "boundary_parameter": "a31",
        "numeric_recovers": True,
        "boundary_satisfied": False,
        "agree": False,
    }
    assert cc["S"]["agree"] is True and cc["E"]["agree"] is True


def test_report_json(base_pos):
    d = json.loads(json.dumps(classify_scenario(base_pos).to_dict()))
    assert d["scenario"] == "Viable"
    assert len(d["proposition1"]) == 3 and len(d["recovery"]) == 3


@settings(max_examples=300)
@given(template_specs())
def test_recovery_equals_growth_at_embedded_fixed_point(spec):
    for d in range(3):
        mask = [i for i in range(3) if i != d]
        fp = subsystem_fixed_point(spec, mask)
        assert fp.location[d] == 0.0
        assert recovery_sign(spec, d)[0] == per_capita_growth(spec, fp.location)[d]


@settings(max_examples=300)
@given(template_specs())
def test_label_matches_stored_signs(spec):
    report = classify_scenario(spec)
    assert scenario_from_signs(report.signs) == report.scenario


@given(template_specs(), st.sampled_from([0.5, 2.0, 10.0]))
def test_scenario_invariant_under_time_rescaling(spec, c):
    assert classify_scenario(ModelSpec3(c * spec.r, spec.A)).signs == classify_scenario(spec).signs


def _traj(states):
    states = np.asarray(states, dtype=float)
    return Trajectory(np.arange(len(states), dtype=float), states)


def test_persistence_all_above():
    assert persistence_check(_traj([[1, 1, 1], [2, 2, 2]]), 1e-6) == 0.0


def test_persistence_late_recovery():
    assert persistence_check(_traj([[1, 1, 1], [1, 0, 1], [1, 1, 1], [1, 1, 1]]), 1e-6) == 2.0


def test_persistence_absent_when_collapsing():
    assert persistence_check(_traj([[1, 1, 1], [1, 1, 1e-9], [1, 1, 1e-12]]), 1e-6) is None


def test_baseline_persistence_horizon(base_pos):
    traj = simulate(base_pos, X_BASE, IntegratorConfig())
    report = classify_scenario(base_pos, traj, 1e-6)
    assert report.persistence_horizon == 0.0
