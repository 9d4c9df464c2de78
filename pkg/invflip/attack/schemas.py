"""
Pydantic schemas for plan.json
"""

from pydantic import BaseModel, Field

from ..invariants.schemas import AtomOut
from .models import DriverPlan


# OUTPUT SCHEMAS
class CommandOut(BaseModel):
    controller: str = Field(description="Controller instance ID (C_x)")
    forced: str = Field(description="min or max")
    forced_value: float = Field(description="OUT_MIN or OUT_MAX of the controller")
    out_target: str = Field(description="Controller output variable (u_x)")
    target_atom: AtomOut


class EnforcementOut(BaseModel):
    variable: str = Field(description="Operator variable set by the driver")
    value: float
    target_atom: AtomOut


class UnreachableOut(BaseModel):
    atom: AtomOut
    reason: str


class PlanOut(BaseModel):
    mode: str = Field(description="sign_consistent or paper_literal")
    commands: list[CommandOut] = Field(default_factory=list)
    direct_enforcements: list[EnforcementOut] = Field(default_factory=list)
    unreachable: list[UnreachableOut] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)

    @classmethod
    def from_plan(cls, plan: DriverPlan) -> "PlanOut":
        return cls(
            mode=str(plan.mode),
            commands=[
                CommandOut(
                    controller=c.controller,
                    forced=str(c.forced),
                    forced_value=c.forced_value,
                    out_target=c.out_target,
                    target_atom=AtomOut.from_atom(c.target_atom),
                )
                for c in plan.commands
            ],
            direct_enforcements=[
                EnforcementOut(
                    variable=e.variable,
                    value=e.value,
                    target_atom=AtomOut.from_atom(e.target_atom),
                )
                for e in plan.direct_enforcements
            ],
            unreachable=[
                UnreachableOut(atom=AtomOut.from_atom(u.atom), reason=u.reason)
                for u in plan.unreachable
            ],
            warnings=list(plan.warnings),
        )
