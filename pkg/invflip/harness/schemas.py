"""
Pydantic schema of the scenario report JSON
"""

from pydantic import BaseModel, Field

from ..attack.schemas import PlanOut
from .models import Report


# OUTPUT SCHEMAS
class ReportOut(BaseModel):
    mode: str = Field(description="baseline, disruption, hazard or dormant")
    hazard_occurred: bool
    time_to_hazard_s: float | None = Field(
        default=None, description="First Hazard event, seconds from start"
    )
    disruption_onset_s: float | None = Field(
        default=None, description="First Disruption-onset event, seconds from start"
    )
    throughput_loss: float = Field(
        ge=0, le=1, description="Lost pumped volume fraction"
    )
    plan: PlanOut | None = None
    traces: list[str] = Field(default_factory=list, description="Written trace CSVs")
    warnings: list[str] = Field(default_factory=list)
    trigger_observed: bool = Field(
        default=False, description="Whether P(x) held at any sample of the attacked run"
    )

    @classmethod
    def from_report(cls, report: Report) -> "ReportOut":
        return cls(
            mode=str(report.mode),
            hazard_occurred=report.hazard_occurred,
            time_to_hazard_s=report.time_to_hazard,
            disruption_onset_s=report.disruption_onset,
            throughput_loss=report.throughput_loss,
            plan=PlanOut.from_plan(report.plan) if report.plan is not None else None,
            traces=list(report.trace_paths),
            warnings=list(report.warnings),
            trigger_observed=report.trigger_observed,
        )
