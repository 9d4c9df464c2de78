import pytest

from invflip.invariants.models import Action, PidConfig
from invflip.sim.models import PidState
from invflip.sim.pid import pid_step


def _cfg(
    kp: float = 2.0,
    ki: float = 0.0,
    kd: float = 0.0,
    action: Action = Action.DIRECT,
    sp: float = 50.0,
) -> PidConfig:
    return PidConfig("LIC101", "x1", sp, kp, ki, kd, action, 0.0, 100.0, "v1")


def test_proportional_direct() -> None:
    out, _ = pid_step(_cfg(), PidState(), 47.0, 0.1)
    assert out == pytest.approx(6.0, abs=1e-9)


def test_proportional_reverse_clamps_to_minimum() -> None:
    out, _ = pid_step(_cfg(action=Action.REVERSE), PidState(), 47.0, 0.1)
    assert out == 0.0


def test_rectangle_rule_integral() -> None:
    out, state = pid_step(_cfg(kp=0.0, ki=1.0), PidState(), 48.0, 0.5)
    assert out == pytest.approx(1.0, abs=1e-9)
    assert state.integral == pytest.approx(1.0, abs=1e-9)


def test_integral_over_many_steps() -> None:
    cfg = _cfg(kp=0.0, ki=0.5)
    state = PidState()
    for _ in range(200):
        out, state = pid_step(cfg, state, 48.0, 0.1)
    assert out == pytest.approx(0.5 * 2.0 * 200 * 0.1, abs=1e-9)


def test_proportional_only_matches_clamped_gain() -> None:
    cfg = _cfg(kp=3.0)
    for pv in (0.0, 20.0, 49.5, 50.0, 80.0):
        out, _ = pid_step(cfg, PidState(), pv, 0.1)
        assert out == pytest.approx(min(100.0, max(0.0, 3.0 * (50.0 - pv))), abs=1e-9)


def test_first_step_has_no_derivative_kick() -> None:
    cfg = _cfg(kp=0.0, kd=10.0)
    out, state = pid_step(cfg, PidState(), 40.0, 0.1)
    assert out == 0.0
    out, _ = pid_step(cfg, state, 39.0, 0.1)
    assert out == pytest.approx(100.0)


def test_derivative_uses_error_change() -> None:
    cfg = _cfg(kp=0.0, kd=0.5)
    _, state = pid_step(cfg, PidState(), 49.0, 0.1)
    out, _ = pid_step(cfg, state, 48.0, 0.1)
    assert out == pytest.approx(0.5 * (2.0 - 1.0) / 0.1, abs=1e-9)


def test_anti_windup_bounds_integral_under_saturation() -> None:
    cfg = _cfg(kp=2.0, ki=0.1)
    state = PidState()
    for _ in range(6000):
        out, state = pid_step(cfg, state, 0.0, 0.1)
    assert out == 100.0
    # once 2 * 50 alone saturates the output, the integral stops growing
    assert abs(state.integral) <= 50.0 * 0.1 + 1e-9


def test_integral_recovers_in_opposite_direction() -> None:
    cfg = _cfg(kp=0.1, ki=0.1)
    state = PidState(integral=100.0, prev_error=-10.0, initialized=True)
    _, state = pid_step(cfg, state, 60.0, 0.1)
    assert state.integral == pytest.approx(99.0)


def test_dt_must_be_positive() -> None:
    with pytest.raises(ValueError):
        pid_step(_cfg(), PidState(), 50.0, 0.0)
