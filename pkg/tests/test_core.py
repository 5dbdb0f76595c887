import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stirapopt.core import (
    HALF_PI,
    AdiabaticState,
    AngleSchedule,
    Jump,
    SystemParams,
    estimate_c2,
    fields_from_angle,
    from_adiabatic,
    linear_segment,
    to_adiabatic,
)
from stirapopt.errors import DomainError, ScheduleError

angles = st.floats(0.0, HALF_PI)
any_angle = st.floats(-10.0, 10.0)
amp = st.floats(-1.0, 1.0)


def test_system_params_time_mapping():
    params = SystemParams(gamma_ratio=10.0)
    assert params.physical_time(250.0) == pytest.approx(2500.0)
    assert params.normalized_time(2500.0) == pytest.approx(250.0)
    assert SystemParams().is_reduced_limit
    with pytest.raises(DomainError):
        SystemParams(gamma_ratio=0.0)
    with pytest.raises(DomainError):
        SystemParams(gamma_ratio=-1.0)
    with pytest.raises(DomainError):
        SystemParams().physical_time(1.0)


@pytest.mark.parametrize(
    "theta, expected",
    [(0.0, (0.0, 1.0)), (HALF_PI, (1.0, 0.0)), (math.pi / 4, (2**-0.5, 2**-0.5))],
)
def test_fields_from_angle(theta, expected):
    assert fields_from_angle(theta) == pytest.approx(expected, abs=1e-15)


def test_fields_scale_with_omega0():
    p, s = fields_from_angle(math.pi / 4, SystemParams(omega0=3.0))
    assert p == pytest.approx(3.0 / math.sqrt(2))
    assert s == pytest.approx(3.0 / math.sqrt(2))


@pytest.mark.parametrize("theta", [-0.1, HALF_PI + 0.01, 4.0])
def test_fields_from_angle_rejects_out_of_range(theta):
    with pytest.raises(DomainError):
        fields_from_angle(theta)


def test_field_constraint_on_many_angles():
    rng = np.random.default_rng(5)
    for theta in rng.uniform(0.0, HALF_PI, 10_000):
        p, s = fields_from_angle(theta)
        assert abs(p * p + s * s - 1.0) < 1e-14


def test_to_adiabatic_examples():
    a = to_adiabatic(1.0, 0.0, 0.0)
    assert (a.y, a.x) == (1.0, 0.0)
    a = to_adiabatic(1.0, 0.0, HALF_PI)
    assert a.y == pytest.approx(0.0, abs=1e-16) and a.x == pytest.approx(1.0)


def test_to_adiabatic_matches_matrix_product():
    theta = 0.3
    a = to_adiabatic(0.6, 0.8, theta)
    m = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    yx = m @ np.array([0.6, 0.8])
    assert (a.y, a.x) == pytest.approx(tuple(yx), abs=1e-15)
    assert a.y**2 + a.x**2 == pytest.approx(1.0, abs=1e-14)


def test_from_adiabatic_examples():
    assert from_adiabatic(AdiabaticState(1.0, 0.0), HALF_PI) == pytest.approx((0.0, -1.0), abs=1e-15)
    assert from_adiabatic(AdiabaticState(0.0, 1.0), 0.0) == (0.0, 1.0)


@given(amp, amp, any_angle)
def test_round_trip_and_norm(c1, c3, theta):
    a = to_adiabatic(c1, c3, theta)
    back = from_adiabatic(a, theta)
    assert back == pytest.approx((c1, c3), abs=1e-14)
    assert abs(a.x**2 + a.y**2 - (c1**2 + c3**2)) < 1e-14


def test_estimate_c2():
    assert estimate_c2(1.0, 0.0, 0.0, SystemParams(10.0)) == 0
    assert estimate_c2(1.0, 0.0, HALF_PI, SystemParams(10.0)) == pytest.approx(-0.1j)
    assert estimate_c2(0.0, 0.0, 0.7, SystemParams(10.0)) == 0
    assert estimate_c2(0.3, 0.4, 0.7, SystemParams()) == 0


def test_estimate_c2_is_imaginary():
    c2 = estimate_c2(0.6, -0.8, 0.9, SystemParams(2.5))
    assert c2.real == 0.0 and c2.imag != 0.0


def _bsb(T=10.0, theta0=0.2, slope=0.1):
    seg = linear_segment(0.0, T, theta0, slope)
    return AngleSchedule(T, [seg], [Jump(0.0, 0.0, theta0), Jump(T, theta0 + slope * T, HALF_PI)])


def test_schedule_two_sided_evaluation():
    s = _bsb()
    assert s.theta(0.0, "left") == 0.0
    assert s.theta(0.0, "right") == pytest.approx(0.2)
    assert s.theta(10.0, "left") == pytest.approx(1.2)
    assert s.theta(10.0, "right") == HALF_PI
    assert s.theta(5.0) == pytest.approx(0.7)
    assert s.rate(5.0) == pytest.approx(0.1)
    assert s.satisfies_boundary_conditions()


def test_schedule_interior_jump_is_two_sided():
    a = linear_segment(0.0, 2.0, 0.0, 0.1)
    b = linear_segment(2.0, 4.0, 1.0, 0.1)
    s = AngleSchedule(4.0, [a, b], [Jump(2.0, 0.2, 1.0), Jump(4.0, 1.2, HALF_PI)])
    assert s.theta(2.0, "left") == pytest.approx(0.2)
    assert s.theta(2.0, "right") == pytest.approx(1.0)
    assert s.theta(1.0) == pytest.approx(0.1)
    assert s.theta(3.0) == pytest.approx(1.1)


def test_schedule_rejects_missing_jump():
    a = linear_segment(0.0, 2.0, 0.0, 0.1)
    b = linear_segment(2.0, 4.0, 1.0, 0.1)
    with pytest.raises(ScheduleError):
        AngleSchedule(4.0, [a, b], [])


def test_schedule_rejects_mismatched_jump():
    seg = linear_segment(0.0, 1.0, 0.3, 0.1)
    with pytest.raises(ScheduleError):
        AngleSchedule(1.0, [seg], [Jump(0.0, 0.0, 0.5)])


def test_schedule_rejects_out_of_range_angle():
    seg = linear_segment(0.0, 10.0, 0.0, 0.5)
    with pytest.raises(DomainError):
        AngleSchedule(10.0, [seg], [])


def test_schedule_rejects_bad_duration_and_gaps():
    with pytest.raises(ScheduleError):
        AngleSchedule(0.0, [linear_segment(0.0, 1.0, 0.0, 0.0)])
    with pytest.raises(ScheduleError):
        AngleSchedule(2.0, [linear_segment(0.0, 1.0, 0.0, 0.0), linear_segment(1.5, 2.0, 0.0, 0.0)])


def test_schedule_rejects_unordered_jumps():
    seg = linear_segment(0.0, 1.0, 0.3, 0.1)
    with pytest.raises(ScheduleError):
        AngleSchedule(1.0, [seg], [Jump(0.0, 0.0, 0.3), Jump(0.0, 0.0, 0.3), Jump(1.0, 0.4, HALF_PI)])


def test_schedule_outside_interval():
    with pytest.raises(DomainError):
        _bsb().theta(11.0)
