import math

import pytest
from hypothesis import given, settings, strategies as st

from tactile_grasp import kinematics as kin
from tactile_grasp.kinematics import DEG, Digit, FingerState, HandState, Joint

deltas = st.floats(min_value=0.0, max_value=0.3, allow_nan=False)


def test_joint_sets():
    assert set(FingerState.extended(Digit.FF).angles) == {Joint.J1, Joint.J2, Joint.J3, Joint.J4}
    assert set(FingerState.extended(Digit.TH).angles) == set(Joint)


def test_j5_only_on_thumb():
    kin.JointId(Digit.TH, Joint.J5)
    with pytest.raises(ValueError):
        kin.JointId(Digit.MF, Joint.J5)


def test_pre_grasp_pose():
    hand = kin.set_pre_grasp(HandState())
    for f in hand.fingers:
        assert all(v == 0.0 for v in f.angles.values())
    assert hand.thumb[Joint.J5] == pytest.approx(70 * DEG)


def test_with_angles_clamps():
    f = FingerState.extended(Digit.FF).with_angles(J2=2.0, J4=-1.0)
    assert f[Joint.J2] == 90 * DEG
    assert f[Joint.J4] == -20 * DEG


def test_virtual_j0_moves_j2_first():
    f = kin.actuate_virtual_j0(FingerState.extended(Digit.FF), 0.3)
    assert f[Joint.J2] == pytest.approx(0.3)
    assert f[Joint.J1] == 0.0


def test_virtual_j0_spills_into_j1_at_saturation():
    f = FingerState.extended(Digit.FF).with_angles(J2=90 * DEG - 0.02)
    g = kin.actuate_virtual_j0(f, 0.05)
    assert g[Joint.J2] == 90 * DEG
    assert g[Joint.J1] == pytest.approx(0.03)


def test_virtual_j0_caps_coupled_sum():
    f = FingerState.extended(Digit.FF).with_angles(J1=90 * DEG - 0.01, J2=90 * DEG)
    g = kin.actuate_virtual_j0(f, 0.5)
    assert g[Joint.J1] + g[Joint.J2] <= math.pi + 1e-15
    assert kin.coupled_exhausted(g)


def test_virtual_j0_thumb_drives_j1():
    g = kin.actuate_virtual_j0(FingerState.extended(Digit.TH), 0.1)
    assert g[Joint.J1] == pytest.approx(0.1)
    assert g[Joint.J2] == 0.0


def test_negative_step_rejected():
    with pytest.raises(ValueError):
        kin.actuate_virtual_j0(FingerState.extended(Digit.FF), -0.01)
    with pytest.raises(ValueError):
        kin.actuate_base(FingerState.extended(Digit.FF), -0.01)


def test_base_joint_per_digit():
    assert kin.actuate_base(FingerState.extended(Digit.RF), 0.2)[Joint.J3] == pytest.approx(0.2)
    assert kin.actuate_base(FingerState.extended(Digit.TH), 0.2)[Joint.J4] == pytest.approx(0.2)


def test_fingertip_closure_range():
    f = FingerState.extended(Digit.FF)
    assert kin.fingertip_closure(f) == 0.0
    full = f.with_angles(J1=math.pi / 2, J2=math.pi / 2, J3=math.pi / 2)
    assert kin.fingertip_closure(full) == pytest.approx(1.0)
    half = f.with_angles(J1=math.pi / 4, J2=math.pi / 4, J3=math.pi / 4)
    assert kin.fingertip_closure(half) == pytest.approx(0.5)


def test_hand_requires_all_digits_in_order():
    with pytest.raises(ValueError):
        HandState({Digit.FF: FingerState.extended(Digit.FF)})


@given(st.sampled_from(kin.FINGERS), st.lists(deltas, max_size=60))
@settings(max_examples=300, deadline=None)
def test_virtual_j0_invariants(digit, steps):
    f = FingerState.extended(digit)
    for d in steps:
        g = kin.actuate_virtual_j0(f, d)
        assert g[Joint.J2] >= g[Joint.J1]
        assert g[Joint.J1] + g[Joint.J2] <= math.pi + 1e-12
        assert kin.within_limits(g)
        assert g[Joint.J1] >= f[Joint.J1] and g[Joint.J2] >= f[Joint.J2]
        if f[Joint.J2] < 90 * DEG - kin.J2_SATURATION_EPS:
            assert g[Joint.J1] == f[Joint.J1]
        f = g


@given(st.sampled_from(kin.DIGITS), st.lists(deltas, max_size=40))
@settings(max_examples=200, deadline=None)
def test_base_actuation_stays_in_limits(digit, steps):
    f = FingerState.extended(digit)
    for d in steps:
        f = kin.actuate_base(f, d)
        assert kin.within_limits(f)


def test_closure_example_base_only():
    f = FingerState.extended(Digit.FF).with_angles(J3=45 * DEG)
    assert kin.fingertip_closure(f) == pytest.approx(1 / 6)


@given(st.sampled_from(kin.DIGITS), st.lists(st.tuples(st.booleans(), deltas), max_size=40))
@settings(max_examples=200, deadline=None)
def test_closure_non_decreasing(digit, steps):
    f = FingerState.extended(digit)
    for base, d in steps:
        g = kin.actuate_base(f, d) if base else kin.actuate_virtual_j0(f, d)
        assert kin.fingertip_closure(g) >= kin.fingertip_closure(f) - 1e-15
        f = g


def test_transverse_axis_never_commanded():
    f = FingerState.extended(Digit.MF)
    for _ in range(100):
        f = kin.actuate_base(kin.actuate_virtual_j0(f, 0.05), 0.05)
    assert f[Joint.J4] == 0.0
