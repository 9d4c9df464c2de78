"""
This module stores the main business logic for running baseline and attacked
scenarios and measuring their impact
"""

import logging
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

from ..attack.models import AttackArtifacts, PayloadTerm, SynthMode
from ..attack.services import synth_term_payload, synthesize
from ..config import get_settings
from ..errors import InvflipError, LengthMismatch, StageError
from ..invariants.models import SafetyInvariant
from ..invariants.services import extract_controllers, extract_invariants
from ..sim.engine import run_closed_loop
from ..sim.models import EventKind, ScenarioConfig, ScenarioMode, SimTrace
from ..sim.monitor import monitor_invariant
from ..sim.schemas import PlantConfig, write_trace_csv
from ..st.models import Program, Role
from ..st.parser import load_program
from .models import Metrics, Report

log = logging.getLogger(__name__)


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Relabels any domain, file or value error raised inside as a stage error."""
    try:
        yield
    except StageError:
        raise
    except (InvflipError, OSError, ValueError) as e:
        log.exception("Stage failed", extra={"stage": name})
        raise StageError(name, e) from e


def throughput(trace: SimTrace) -> float:
    """Pumped volume over the run, in % of tank: sum of q_out * pump_on * dt."""
    return sum(trace.q_out * trace.dt for s in trace.samples if s.pump_on)


def compute_metrics(baseline: SimTrace, attacked: SimTrace) -> Metrics:
    """
    Compares an attacked trace with its baseline.

    Raises:
        LengthMismatch: If the traces differ in sample count or step.
    """
    if len(baseline.samples) != len(attacked.samples):
        raise LengthMismatch(
            f"baseline has {len(baseline.samples)} samples, "
            f"attacked trace has {len(attacked.samples)}"
        )
    if abs(baseline.dt - attacked.dt) > 1e-9:
        raise LengthMismatch(f"step {attacked.dt} differs from baseline {baseline.dt}")

    reference = throughput(baseline)
    loss = 0.0
    if reference > 0:
        loss = min(1.0, max(0.0, 1.0 - throughput(attacked) / reference))
    return Metrics(
        throughput_loss=loss,
        time_to_hazard=attacked.first_event(EventKind.HAZARD),
        disruption_onset=attacked.first_event(EventKind.DISRUPTION_ONSET),
    )


def compare_traces(
    baseline: SimTrace, attacked: SimTrace, mode: ScenarioMode
) -> Report:
    """Builds a report from two traces whose events are already recorded."""
    metrics = compute_metrics(baseline, attacked)
    return Report(
        mode=mode,
        hazard_occurred=metrics.time_to_hazard is not None,
        time_to_hazard=metrics.time_to_hazard,
        disruption_onset=metrics.disruption_onset,
        throughput_loss=metrics.throughput_loss,
        trigger_observed=any(s.p_truth for s in attacked.samples),
    )


def _scenario_programs(
    mode: ScenarioMode, safety: Program, artifacts: AttackArtifacts | None
) -> tuple[Program, Program | None]:
    """Returns the safety program and the driver program run by a mode."""
    match mode:
        case ScenarioMode.BASELINE:
            return safety, None
        case ScenarioMode.DISRUPTION:
            assert artifacts is not None
            return artifacts.f_ms, None
        case ScenarioMode.HAZARD:
            assert artifacts is not None
            return synth_term_payload(safety, PayloadTerm.HAZARD), artifacts.f_mc
        case ScenarioMode.DORMANT:
            return synth_term_payload(safety, PayloadTerm.HAZARD), None


def _with_monitor(
    attacked: SimTrace, inv: SafetyInvariant, baseline: SimTrace
) -> SimTrace:
    events = monitor_invariant(attacked, inv, baseline)
    return replace(attacked, events=tuple(sorted(events, key=lambda e: e.t)))


def run_scenario(
    mode: ScenarioMode,
    safety_file: str | Path,
    control_file: str | Path | None,
    plant_config: PlantConfig | None = None,
    duration: float | None = None,
    dt: float | None = None,
    out_dir: str | Path | None = None,
    paper_literal: bool = False,
    noise: float = 0.0,
    seed: int | None = None,
) -> Report:
    """
    Runs one scenario end to end next to its baseline.

    Baseline runs the original programs; Disruption runs the complemented
    safety payload; Hazard runs the hazard-term payload with the driver
    program; Dormant runs the hazard-term payload alone and waits for P(x)
    to arise on its own. A baseline run is always made so the attacked run
    can be compared with it.

    Args:
        mode: Scenario to run
        safety_file: Safety program (F_s)
        control_file: Control program (F_c), optional
        plant_config: Plant parameters; defaults apply when absent
        duration: Seconds; falls back to the plant file, then the settings
        dt: Scan step; falls back the same way
        out_dir: Directory for the trace CSVs; nothing is written when absent
        paper_literal: Use the printed forced-output table
        noise: Uniform sensor noise amplitude
        seed: Noise seed, required when noise is set

    Raises:
        StageError: Wrapping the failure of the parse, extract, synth,
            simulate or report stage.
    """
    settings = get_settings()
    plant_config = plant_config or PlantConfig()
    if duration is None:
        duration = plant_config.duration
    if duration is None:
        duration = settings.duration
    if dt is None:
        dt = plant_config.dt
    if dt is None:
        dt = settings.dt

    with stage("parse"):
        safety = load_program(safety_file, Role.SAFETY)
        control = (
            load_program(control_file, Role.CONTROL)
            if control_file is not None
            else None
        )
    with stage("extract"):
        invariant = extract_invariants(safety)[0]
        if control is not None:
            extract_controllers(control)

    artifacts: AttackArtifacts | None = None
    if mode is not ScenarioMode.BASELINE:
        with stage("synth"):
            artifacts = synthesize(
                safety,
                control,
                SynthMode.PAPER_LITERAL if paper_literal else SynthMode.SIGN_CONSISTENT,
            )

    with stage("simulate"):
        base_config = ScenarioConfig(
            safety_program=safety,
            control_program=control,
            plant=plant_config.params(),
            initial=plant_config.initial_state(),
            duration=duration,
            dt=dt,
            externals=tuple(sorted(plant_config.externals.items())),
            noise=noise,
            seed=seed,
            invariant=invariant,
        )
        baseline = run_closed_loop(base_config)
        attacked = baseline
        if mode is not ScenarioMode.BASELINE:
            safety_run, driver = _scenario_programs(mode, safety, artifacts)
            attacked = run_closed_loop(
                replace(
                    base_config,
                    safety_program=safety_run,
                    driver_program=driver,
                    mode=mode,
                )
            )
            attacked = _with_monitor(attacked, invariant, baseline)

    paths: list[str] = []
    with stage("report"):
        report = compare_traces(baseline, attacked, mode)
        if out_dir is not None:
            out = Path(out_dir)
            paths.append(str(write_trace_csv(baseline, out / "baseline.csv")))
            if mode is not ScenarioMode.BASELINE:
                paths.append(str(write_trace_csv(attacked, out / f"{mode}.csv")))

    warnings = list(invariant.warnings)
    if artifacts is not None:
        warnings.extend(artifacts.plan.warnings)
    log.info(
        "Scenario report ready",
        extra={
            "mode": str(mode),
            "hazard_occurred": report.hazard_occurred,
            "throughput_loss": report.throughput_loss,
        },
    )
    return replace(
        report,
        plan=artifacts.plan if artifacts is not None else None,
        trace_paths=tuple(paths),
        warnings=tuple(warnings),
    )
