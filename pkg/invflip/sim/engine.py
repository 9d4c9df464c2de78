"""
This module stores the scan-cycle interpreter and the closed-loop runner
"""

import logging
import math
import random
from collections.abc import Callable, Iterable, MutableMapping
from dataclasses import replace

from ..errors import ScenarioError, UnknownTag
from ..invariants.models import PidConfig, SafetyInvariant
from ..invariants.services import pid_config_from_call, scan_invariants
from ..st.evaluate import evaluate, truth
from ..st.models import Assign, DataType, IfStmt, PidCall, Program, Stmt, VarKind
from .models import (
    PidState,
    PlantState,
    Sample,
    ScenarioConfig,
    ScenarioMode,
    SimTrace,
    TagMap,
)
from .monitor import monitor_invariant
from .pid import clamp, pid_step
from .plant import plant_step

log = logging.getLogger(__name__)

PidHook = Callable[[PidCall, MutableMapping[str, float]], None]


def execute(
    stmts: Iterable[Stmt], env: MutableMapping[str, float], on_pid: PidHook
) -> None:
    """Runs statements once against the shared tag table."""
    for stmt in stmts:
        match stmt:
            case Assign():
                env[stmt.target] = evaluate(stmt.value, env)
            case IfStmt():
                if truth(stmt.cond, env):
                    execute(stmt.then_body, env, on_pid)
                elif stmt.else_body is not None:
                    execute(stmt.else_body, env, on_pid)
            case PidCall():
                on_pid(stmt, env)


def sample_count(duration: float, dt: float) -> int:
    return math.floor(duration / dt + 1e-9) + 1


def _validate(sc: ScenarioConfig) -> None:
    if not 0 < sc.dt <= 1:
        raise ScenarioError(f"dt must be in (0, 1], got {sc.dt}")
    if sc.duration < sc.dt:
        raise ScenarioError(f"duration {sc.duration} is shorter than dt {sc.dt}")
    if (sc.driver_program is not None) != (sc.mode is ScenarioMode.HAZARD):
        raise ScenarioError("a driver program is used in hazard mode and only there")
    if sc.mode is not ScenarioMode.BASELINE and sc.invariant is None:
        raise ScenarioError(
            f"{sc.mode} runs need the original safety invariant to monitor"
        )
    if sc.noise < 0:
        raise ScenarioError("noise amplitude must be nonnegative")
    if sc.noise > 0 and sc.seed is None:
        raise ScenarioError("sensor noise needs an explicit seed")


def _programs(sc: ScenarioConfig) -> list[Program]:
    return [
        p
        for p in (sc.control_program, sc.driver_program, sc.safety_program)
        if p is not None
    ]


def initial_env(sc: ScenarioConfig, state: PlantState) -> dict[str, float]:
    """
    Builds the tag table shared by all programs of a scenario.

    Physical variables must be plant sensors and actuator variables plant
    actuators; operator and environmental variables take their value from
    the scenario externals, then the declared initial value, then 0.

    Raises:
        UnknownTag: If a program declares a tag the plant cannot provide.
    """
    tags = sc.tags
    externals = dict(sc.externals)
    env: dict[str, float] = {
        tags.level: state.level,
        tags.pressure: state.pressure,
        tags.valve: state.valve,
        tags.pump: float(state.pump_on),
    }
    for program in _programs(sc):
        for decl in program.decls:
            if decl.dtype is DataType.PID:
                continue
            match decl.kind:
                case VarKind.PHYSICAL if decl.name not in tags.sensors:
                    raise UnknownTag(decl.name, f"program {program.name}")
                case VarKind.ACTUATOR if decl.name not in tags.actuators:
                    raise UnknownTag(decl.name, f"program {program.name}")
                case VarKind.OPERATOR | VarKind.ENVIRONMENTAL:
                    if decl.name in externals:
                        env[decl.name] = externals[decl.name]
                    elif decl.name not in env:
                        env[decl.name] = float(decl.init) if decl.init else 0.0
    return env


def _driver_targets(driver: Program | None) -> set[str]:
    if driver is None:
        return set()
    return {stmt.target for stmt in driver.stmts if isinstance(stmt, Assign)}


def _controllers(program: Program | None) -> dict[str, PidConfig]:
    if program is None:
        return {}
    configs: dict[str, PidConfig] = {}

    def collect(stmts: Iterable[Stmt]) -> None:
        for stmt in stmts:
            match stmt:
                case PidCall():
                    configs[stmt.instance] = pid_config_from_call(stmt)
                case IfStmt():
                    collect(stmt.then_body)
                    collect(stmt.else_body or ())

    collect(program.stmts)
    return configs


def primary_invariant(program: Program) -> SafetyInvariant | None:
    invariants = scan_invariants(program).invariants
    return invariants[0] if invariants else None


def run_closed_loop(sc: ScenarioConfig) -> SimTrace:
    """
    Runs a scenario scan by scan and returns the sampled trace.

    Each scan reads the sensors, runs the control program (PID calls whose
    output the driver program overrides are skipped), then the driver, then
    the safety program, which has the last word on shared actuators. The
    sample is taken after the scan, with the discharge pressure of the new
    pump state, then the plant advances one step. Hazard events are filled
    in by the invariant monitor: baseline runs read the invariant from the
    safety program, attacked runs must carry the original in `invariant`.

    Raises:
        ScenarioError: On an inconsistent configuration.
        UnknownTag: If a program uses a tag the plant does not provide.
    """
    _validate(sc)
    tags: TagMap = sc.tags
    plant = sc.plant
    state = replace(sc.initial, pressure=plant.pump_pressure(sc.initial.pump_on))
    env = initial_env(sc, state)
    plant_tags = {tags.level, tags.pressure, tags.valve, tags.pump}
    external_names = sorted(name for name in env if name not in plant_tags)

    controllers = _controllers(sc.control_program)
    first_output = next(iter(controllers.values())).out_target if controllers else None
    controllers.update(_controllers(sc.safety_program))
    pid_states = {name: PidState() for name in controllers}
    overridden = _driver_targets(sc.driver_program)
    rng = random.Random(sc.seed) if sc.noise > 0 else None

    def on_pid(call: PidCall, table: MutableMapping[str, float]) -> None:
        cfg = controllers[call.instance]
        if cfg.out_target in overridden:
            return
        out, pid_states[call.instance] = pid_step(
            cfg, pid_states[call.instance], table[cfg.pv], sc.dt
        )
        table[cfg.out_target] = out

    invariant = sc.invariant or primary_invariant(sc.safety_program)
    steps = sample_count(sc.duration, sc.dt) - 1
    samples: list[Sample] = []
    externals: tuple[tuple[str, float], ...] = ()
    log.info(
        "Scenario started",
        extra={"mode": str(sc.mode), "samples": steps + 1, "dt": sc.dt},
    )
    for k in range(steps + 1):
        t = k * sc.dt
        env[tags.level] = state.level
        env[tags.pressure] = state.pressure
        if rng is not None:
            env[tags.level] += rng.uniform(-sc.noise, sc.noise)
            env[tags.pressure] += rng.uniform(-sc.noise, sc.noise)

        if sc.control_program is not None:
            execute(sc.control_program.stmts, env, on_pid)
        if sc.driver_program is not None:
            execute(sc.driver_program.stmts, env, on_pid)
        execute(sc.safety_program.stmts, env, on_pid)

        pump_on = env[tags.pump] != 0.0
        state = replace(
            state,
            valve=clamp(env[tags.valve], 0.0, 100.0),
            pump_on=pump_on,
            pressure=plant.pump_pressure(pump_on),
        )
        ground = dict(env)
        ground[tags.level] = state.level
        ground[tags.pressure] = state.pressure
        if k == 0:
            externals = tuple((name, ground[name]) for name in external_names)
        samples.append(
            Sample(
                t=t,
                level=state.level,
                pressure=state.pressure,
                valve=state.valve,
                pump_on=state.pump_on,
                p_truth=truth(invariant.predicate, ground) if invariant else False,
                pid_out=env[first_output] if first_output else 0.0,
            )
        )
        if k < steps:
            state = plant_step(state, plant, sc.dt)

    trace = SimTrace(
        samples=tuple(samples),
        events=(),
        dt=sc.dt,
        duration=sc.duration,
        mode=sc.mode,
        q_out=plant.q_out,
        tags=tags,
        externals=externals,
    )
    if invariant is not None:
        trace = replace(trace, events=tuple(monitor_invariant(trace, invariant)))
    log.info(
        "Scenario finished",
        extra={"mode": str(sc.mode), "events": len(trace.events)},
    )
    return trace
