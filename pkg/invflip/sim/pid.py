"""
This module stores the discrete PID step with conditional-integration
anti-windup
"""

from ..invariants.models import Action, PidConfig
from .models import PidState


def clamp(value: float, lower: float, upper: float) -> float:
    return max(lower, min(upper, value))


def control_error(cfg: PidConfig, pv: float) -> float:
    """SP - PV for a direct-acting loop, PV - SP for a reverse-acting one."""
    if cfg.action is Action.DIRECT:
        return cfg.sp - pv
    return pv - cfg.sp


def pid_step(
    cfg: PidConfig, st: PidState, pv: float, dt: float
) -> tuple[float, PidState]:
    """
    Advances one controller by one scan.

    The integral uses the rectangle rule. While the output is saturated and
    the error would push it further into saturation, integration is frozen.
    The first step has no derivative term.

    Args:
        cfg: Controller configuration
        st: State from the previous scan
        pv: Process variable reading
        dt: Scan period in seconds, must be positive

    Returns:
        tuple: Clamped output and the new state
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    error = control_error(cfg, pv)
    derivative = (error - st.prev_error) / dt if st.initialized else 0.0

    integral = st.integral + error * dt
    raw = cfg.kp * error + cfg.ki * integral + cfg.kd * derivative
    pushing = cfg.ki * error
    if (raw > cfg.out_max and pushing > 0) or (raw < cfg.out_min and pushing < 0):
        integral = st.integral
        raw = cfg.kp * error + cfg.ki * integral + cfg.kd * derivative

    out = clamp(raw, cfg.out_min, cfg.out_max)
    return out, PidState(integral=integral, prev_error=error, initialized=True)
