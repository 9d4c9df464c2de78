from dataclasses import replace
from pathlib import Path

import pytest

from invflip.errors import LengthMismatch, StageError
from invflip.harness.schemas import ReportOut
from invflip.harness.services import compute_metrics, run_scenario, stage, throughput
from invflip.sim.models import (
    EventKind,
    Sample,
    ScenarioMode,
    SimTrace,
    ViolationEvent,
)
from invflip.sim.schemas import (
    TRACE_HEADER,
    PlantConfig,
    read_trace_csv,
    write_trace_csv,
)

from .conftest import FIXTURES

SAFETY = FIXTURES / "pump_safety.st"
CONTROL = FIXTURES / "level_control.st"


def _trace(pump: list[bool], dt: float = 0.1) -> SimTrace:
    samples = tuple(
        Sample(k * dt, 50.0, 2.0 if on else 0.0, 50.0, on, False, 50.0)
        for k, on in enumerate(pump)
    )
    return SimTrace(
        samples=samples,
        events=(),
        dt=dt,
        duration=(len(pump) - 1) * dt,
        mode=ScenarioMode.BASELINE,
        q_out=1.0,
    )


def test_baseline_scenario_is_unharmed(tmp_path: Path) -> None:
    report = run_scenario(
        ScenarioMode.BASELINE, SAFETY, CONTROL, duration=600.0, out_dir=tmp_path
    )
    assert not report.hazard_occurred
    assert report.throughput_loss == 0.0
    assert report.plan is None
    assert report.trace_paths == (str(tmp_path / "baseline.csv"),)


def test_hazard_scenario_reaches_hazard(tmp_path: Path) -> None:
    report = run_scenario(
        ScenarioMode.HAZARD, SAFETY, CONTROL, duration=120.0, out_dir=tmp_path
    )
    assert report.hazard_occurred
    assert report.time_to_hazard == pytest.approx(40.0, abs=2.0)
    assert report.trigger_observed
    assert report.plan is not None
    assert [c.controller for c in report.plan.commands] == ["LIC101"]
    assert (tmp_path / "hazard.csv").exists()
    assert (tmp_path / "baseline.csv").exists()


def test_disruption_scenario_stops_the_pump() -> None:
    report = run_scenario(ScenarioMode.DISRUPTION, SAFETY, CONTROL, duration=600.0)
    assert not report.hazard_occurred
    assert report.disruption_onset == 0.0
    assert report.throughput_loss >= 0.99
    assert report.trace_paths == ()


def test_dormant_scenario_waits_for_a_trigger() -> None:
    report = run_scenario(ScenarioMode.DORMANT, SAFETY, CONTROL, duration=600.0)
    assert not report.hazard_occurred
    assert not report.trigger_observed
    assert report.throughput_loss == 0.0


def test_plant_file_supplies_duration() -> None:
    config = PlantConfig.load(FIXTURES / "plant.json")
    assert (config.duration, config.dt, config.level0) == (600.0, 0.1, 50.0)
    report = run_scenario(ScenarioMode.BASELINE, SAFETY, CONTROL, plant_config=config)
    assert report.throughput_loss == 0.0


def test_report_json_shape() -> None:
    report = run_scenario(ScenarioMode.HAZARD, SAFETY, CONTROL, duration=60.0)
    body = ReportOut.from_report(report).model_dump()
    assert body["mode"] == "hazard"
    assert body["hazard_occurred"] is True
    assert body["plan"]["commands"][0]["forced"] == "min"
    assert body["disruption_onset_s"] is None


def test_identical_traces_lose_nothing() -> None:
    trace = _trace([True] * 101)
    metrics = compute_metrics(trace, trace)
    assert metrics.throughput_loss == 0.0
    assert metrics.time_to_hazard is None


def test_stopped_pump_loses_everything() -> None:
    metrics = compute_metrics(_trace([True] * 101), _trace([False] * 101))
    assert metrics.throughput_loss == 1.0


def test_half_stopped_pump_loses_half() -> None:
    baseline = _trace([True] * 101)
    attacked = _trace([True] * 50 + [False] * 51)
    loss = compute_metrics(baseline, attacked).throughput_loss
    assert loss == pytest.approx(0.5, abs=0.1 / 10.0)


def test_zero_baseline_throughput_is_no_loss() -> None:
    idle = _trace([False] * 11)
    assert throughput(idle) == 0.0
    assert compute_metrics(idle, idle).throughput_loss == 0.0


def test_metrics_report_first_events() -> None:
    events = (
        ViolationEvent(0.5, EventKind.HAZARD),
        ViolationEvent(0.7, EventKind.HAZARD),
    )
    attacked = replace(_trace([True] * 11), events=events)
    metrics = compute_metrics(_trace([True] * 11), attacked)
    assert metrics.time_to_hazard == 0.5


def test_metrics_need_matching_traces() -> None:
    with pytest.raises(LengthMismatch):
        compute_metrics(_trace([True] * 10), _trace([True] * 11))
    with pytest.raises(LengthMismatch):
        compute_metrics(_trace([True] * 10), _trace([True] * 10, dt=0.2))


def test_missing_file_fails_in_parse_stage(tmp_path: Path) -> None:
    with pytest.raises(StageError) as excinfo:
        run_scenario(ScenarioMode.BASELINE, tmp_path / "nope.st", CONTROL)
    assert excinfo.value.stage == "parse"
    assert str(excinfo.value).startswith("[parse]")


def test_program_without_invariant_fails_in_extract_stage(tmp_path: Path) -> None:
    path = tmp_path / "plain.st"
    path.write_text(
        "PROGRAM PLAIN\nVAR\n  {kind := actuator} u : BOOL;\nEND_VAR\n"
        "  u := 1;\nEND_PROGRAM\n",
        encoding="utf-8",
    )
    with pytest.raises(StageError) as excinfo:
        run_scenario(ScenarioMode.BASELINE, path, CONTROL)
    assert excinfo.value.stage == "extract"


def test_noise_without_seed_fails_in_simulate_stage() -> None:
    with pytest.raises(StageError) as excinfo:
        run_scenario(ScenarioMode.BASELINE, SAFETY, CONTROL, duration=10.0, noise=0.5)
    assert excinfo.value.stage == "simulate"


def test_stage_wraps_value_errors_once() -> None:
    with pytest.raises(StageError) as excinfo:
        with stage("outer"):
            with stage("inner"):
                raise ValueError("bad")
    assert excinfo.value.stage == "inner"
    assert isinstance(excinfo.value.cause, ValueError)


def test_trace_csv_round_trip(tmp_path: Path) -> None:
    report = run_scenario(
        ScenarioMode.HAZARD, SAFETY, CONTROL, duration=45.0, out_dir=tmp_path
    )
    path = tmp_path / "hazard.csv"
    assert str(path) in report.trace_paths
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(TRACE_HEADER)
    assert lines[1].startswith("0.000000,50.000000,")
    assert len(lines) == 1 + 451

    trace = read_trace_csv(path, ScenarioMode.HAZARD)
    assert trace.dt == pytest.approx(0.1)
    assert trace.first_event(EventKind.HAZARD) == pytest.approx(
        report.time_to_hazard, abs=1e-6
    )
    written = write_trace_csv(trace, tmp_path / "copy.csv")
    assert written.read_text(encoding="utf-8") == path.read_text(encoding="utf-8")


def test_reading_a_non_trace_file(tmp_path: Path) -> None:
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="not a trace file"):
        read_trace_csv(path)


@pytest.mark.parametrize(("duration", "dt"), [(0.0, None), (10.0, 0.0)])
def test_zero_duration_or_step_is_rejected(
    duration: float, dt: float | None
) -> None:
    with pytest.raises(StageError) as excinfo:
        run_scenario(ScenarioMode.BASELINE, SAFETY, CONTROL, duration=duration, dt=dt)
    assert excinfo.value.stage == "simulate"
