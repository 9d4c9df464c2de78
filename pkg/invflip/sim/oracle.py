"""
This module stores the closed-loop sign oracle: it finds out by simulation
which way a forced controller output moves the level of the reference plant
"""

from ..attack.models import Direction, Extreme, PayloadTerm
from ..attack.services import synth_term_payload
from ..invariants.models import Action
from ..invariants.services import extract_invariants
from ..st.models import Role
from ..st.parser import parse_text
from .engine import run_closed_loop
from .models import PlantParams, ScenarioConfig, ScenarioMode

_LOW_LEVEL_TRIP = """\
PROGRAM LOW_LEVEL_TRIP
VAR
  {kind := physical, unit := "%"} x1 : REAL;
  {kind := actuator} u : BOOL;
END_VAR
  IF (x1 < 10.0) THEN
    u := 0;
  ELSE
    u := 1;
  END_IF;
END_PROGRAM
"""

_LEVEL_LOOP = """\
PROGRAM LEVEL_LOOP
VAR
  {kind := physical, unit := "%"} x1 : REAL;
  {kind := actuator, unit := "%"} v1 : REAL;
  LIC101 : PID;
END_VAR
  LIC101(PV := x1, SP := 50.0, KP := 2.0, KI := 0.1, KD := 0.0, ACTION := {action},
         OUT_MIN := 0.0, OUT_MAX := 100.0, OUT => v1);
END_PROGRAM
"""

_FORCE_OUTPUT = """\
PROGRAM FORCE_OUTPUT
VAR
  {kind := actuator} v1 : REAL;
END_VAR
  v1 := {value};
END_PROGRAM
"""


def closed_loop_direction(
    action: Action,
    extreme: Extreme,
    params: PlantParams | None = None,
    horizon: float = 20.0,
) -> Direction:
    """
    Forces the reference level controller to one output extreme and reports
    whether the level rose or fell over the horizon.

    Reverse-acting loops run on a fail-open valve so that the unattacked
    loop keeps negative feedback.
    """
    if params is None:
        params = PlantParams(valve_fail_open=action is Action.REVERSE)
    value = "0.0" if extreme is Extreme.MIN else "100.0"
    trip = parse_text(_LOW_LEVEL_TRIP, Role.SAFETY)
    trace = run_closed_loop(
        ScenarioConfig(
            safety_program=synth_term_payload(trip, PayloadTerm.HAZARD),
            control_program=parse_text(
                _LEVEL_LOOP.replace("{action}", str(action)), Role.CONTROL
            ),
            driver_program=parse_text(
                _FORCE_OUTPUT.replace("{value}", value), Role.CONTROL
            ),
            plant=params,
            duration=horizon,
            dt=0.1,
            mode=ScenarioMode.HAZARD,
            invariant=extract_invariants(trip)[0],
        )
    )
    first, last = trace.samples[0].level, trace.samples[-1].level
    return Direction.UP if last > first else Direction.DOWN
