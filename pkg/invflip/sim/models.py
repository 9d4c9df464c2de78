"""
This module stores the simulator state, configuration and trace types
"""

from dataclasses import dataclass, field
from enum import StrEnum

from ..invariants.models import SafetyInvariant
from ..st.models import Program


class ScenarioMode(StrEnum):
    BASELINE = "baseline"
    DISRUPTION = "disruption"
    HAZARD = "hazard"
    DORMANT = "dormant"


class EventKind(StrEnum):
    HAZARD = "Hazard"
    DISRUPTION_ONSET = "Disruption-onset"


@dataclass(frozen=True, slots=True)
class PidState:
    integral: float = 0.0  # accumulated e*dt
    prev_error: float = 0.0
    initialized: bool = False


@dataclass(frozen=True, slots=True)
class PlantParams:
    k_in: float = 0.02  # %/(s * valve %)
    q_out: float = 1.0  # %/s while the pump runs
    p_base: float = 2.0  # bar, pump running
    k_block: float = 4.0  # bar per blockage unit
    blockage: float = 0.0  # environmental, in [0, 1]
    valve_fail_open: bool = False  # opening = 100 - signal when set

    def __post_init__(self) -> None:
        for name in ("k_in", "q_out", "p_base", "k_block", "blockage"):
            if getattr(self, name) < 0:
                raise ValueError(f"plant parameter {name} must be nonnegative")
        if self.blockage > 1:
            raise ValueError("blockage must be in [0, 1]")

    def pump_pressure(self, pump_on: bool) -> float:
        return self.p_base + self.k_block * self.blockage if pump_on else 0.0


@dataclass(frozen=True, slots=True)
class PlantState:
    level: float = 50.0  # % (x1)
    pressure: float = 0.0  # bar (x2)
    valve: float = 0.0  # controller signal to the inlet valve, % (v1)
    pump_on: bool = True  # u


@dataclass(frozen=True, slots=True)
class TagMap:
    """Names under which the plant exposes its sensors and actuators."""

    level: str = "x1"
    pressure: str = "x2"
    pump: str = "u"
    valve: str = "v1"

    @property
    def sensors(self) -> dict[str, str]:
        return {self.level: "level", self.pressure: "pressure"}

    @property
    def actuators(self) -> dict[str, str]:
        return {self.pump: "pump_on", self.valve: "valve"}


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    safety_program: Program
    control_program: Program | None
    driver_program: Program | None = None
    plant: PlantParams = field(default_factory=PlantParams)
    initial: PlantState = field(default_factory=PlantState)
    duration: float = 3600.0
    dt: float = 0.1
    mode: ScenarioMode = ScenarioMode.BASELINE
    tags: TagMap = field(default_factory=TagMap)
    externals: tuple[tuple[str, float], ...] = ()  # operator/environmental tag values
    noise: float = 0.0  # uniform sensor noise amplitude
    seed: int | None = None
    invariant: SafetyInvariant | None = None  # None: the safety program's first


@dataclass(frozen=True, slots=True)
class Sample:
    t: float
    level: float
    pressure: float
    valve: float
    pump_on: bool
    p_truth: bool
    pid_out: float


@dataclass(frozen=True, slots=True)
class ViolationEvent:
    t: float
    kind: EventKind


@dataclass(frozen=True, slots=True)
class SimTrace:
    samples: tuple[Sample, ...]
    events: tuple[ViolationEvent, ...]
    dt: float
    duration: float
    mode: ScenarioMode
    q_out: float
    tags: TagMap = field(default_factory=TagMap)
    externals: tuple[tuple[str, float], ...] = ()

    def first_event(self, kind: EventKind) -> float | None:
        return next((e.t for e in self.events if e.kind is kind), None)
