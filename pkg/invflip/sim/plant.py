"""
This module stores the tank-pump plant model (explicit Euler mass balance)
"""

from dataclasses import replace

from .models import PlantParams, PlantState
from .pid import clamp


def valve_opening(signal: float, params: PlantParams) -> float:
    signal = clamp(signal, 0.0, 100.0)
    return 100.0 - signal if params.valve_fail_open else signal


def outflow(pump_on: bool, params: PlantParams) -> float:
    return params.q_out if pump_on else 0.0


def plant_step(s: PlantState, params: PlantParams, dt: float) -> PlantState:
    """
    Advances the tank by one explicit Euler step.

    level' = clamp(level + (k_in * opening - q_out * pump_on) * dt, 0, 100);
    the discharge pressure follows the pump state without lag.
    """
    inflow = params.k_in * valve_opening(s.valve, params)
    level = clamp(s.level + (inflow - outflow(s.pump_on, params)) * dt, 0.0, 100.0)
    return replace(s, level=level, pressure=params.pump_pressure(s.pump_on))
