"""
Pydantic schema of the plant configuration file and the trace CSV codec
"""

import csv
import json
from collections.abc import Iterable
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from .models import (
    EventKind,
    PlantParams,
    PlantState,
    Sample,
    ScenarioMode,
    SimTrace,
    TagMap,
    ViolationEvent,
)

TRACE_HEADER = ("t", "level", "pressure", "valve", "pump_on", "P", "pid_out", "event")


# INPUT SCHEMAS
class PlantConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k_in: float = Field(default=0.02, ge=0, description="Inflow gain, %/(s * valve %)")
    q_out: float = Field(default=1.0, ge=0, description="Pump outflow, %/s")
    p_base: float = Field(default=2.0, ge=0, description="Pump-on base pressure, bar")
    k_block: float = Field(default=4.0, ge=0, description="Bar per blockage unit")
    blockage: float = Field(default=0.0, ge=0, le=1, description="Line blockage")
    level0: float = Field(default=50.0, ge=0, le=100, description="Initial level, %")
    duration: float | None = Field(default=None, gt=0, description="Seconds")
    dt: float | None = Field(default=None, gt=0, le=1, description="Scan step, s")
    valve_fail_open: bool = False
    externals: dict[str, float] = Field(
        default_factory=dict, description="Operator and environmental tag values"
    )

    @classmethod
    def load(cls, path: str | Path) -> "PlantConfig":
        return cls.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))

    def params(self) -> PlantParams:
        return PlantParams(
            k_in=self.k_in,
            q_out=self.q_out,
            p_base=self.p_base,
            k_block=self.k_block,
            blockage=self.blockage,
            valve_fail_open=self.valve_fail_open,
        )

    def initial_state(self) -> PlantState:
        return PlantState(level=self.level0)


def _row(sample: Sample, events: Iterable[ViolationEvent]) -> list[str]:
    return [
        f"{sample.t:.6f}",
        f"{sample.level:.6f}",
        f"{sample.pressure:.6f}",
        f"{sample.valve:.6f}",
        str(int(sample.pump_on)),
        str(int(sample.p_truth)),
        f"{sample.pid_out:.6f}",
        ";".join(str(e.kind) for e in events),
    ]


def write_trace_csv(trace: SimTrace, path: str | Path) -> Path:
    """Writes one row per sample; the event column lists that sample's events."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    by_time: dict[float, list[ViolationEvent]] = {}
    for event in trace.events:
        by_time.setdefault(event.t, []).append(event)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for sample in trace.samples:
            writer.writerow(_row(sample, by_time.get(sample.t, ())))
    return path


def read_trace_csv(
    path: str | Path,
    mode: ScenarioMode = ScenarioMode.BASELINE,
    q_out: float = 1.0,
    tags: TagMap | None = None,
) -> SimTrace:
    """
    Reads a trace written by `write_trace_csv`.

    The step is recovered from the first two timestamps, so values carry the
    file's six-decimal precision.
    """
    samples: list[Sample] = []
    events: list[ViolationEvent] = []
    with Path(path).open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != TRACE_HEADER:
            raise ValueError(f"{path}: not a trace file (header {reader.fieldnames})")
        for row in reader:
            t = float(row["t"])
            samples.append(
                Sample(
                    t=t,
                    level=float(row["level"]),
                    pressure=float(row["pressure"]),
                    valve=float(row["valve"]),
                    pump_on=row["pump_on"] == "1",
                    p_truth=row["P"] == "1",
                    pid_out=float(row["pid_out"]),
                )
            )
            events.extend(
                ViolationEvent(t, EventKind(kind))
                for kind in row["event"].split(";")
                if kind
            )
    if not samples:
        raise ValueError(f"{path}: trace has no samples")
    dt = samples[1].t - samples[0].t if len(samples) > 1 else 0.0
    return SimTrace(
        samples=tuple(samples),
        events=tuple(events),
        dt=dt,
        duration=samples[-1].t,
        mode=mode,
        q_out=q_out,
        tags=tags or TagMap(),
    )
