"""
This module stores the scenario report types
"""

from dataclasses import dataclass

from ..attack.models import DriverPlan
from ..sim.models import ScenarioMode


@dataclass(frozen=True, slots=True)
class Metrics:
    throughput_loss: float  # fraction in [0, 1]
    time_to_hazard: float | None
    disruption_onset: float | None


@dataclass(frozen=True, slots=True)
class Report:
    mode: ScenarioMode
    hazard_occurred: bool
    time_to_hazard: float | None
    disruption_onset: float | None
    throughput_loss: float
    plan: DriverPlan | None = None
    trace_paths: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()
    trigger_observed: bool = False  # P(x) held at some sample of the attacked run
