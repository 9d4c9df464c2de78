"""
This module stores the attack synthesis types
"""

from dataclasses import dataclass, field
from enum import StrEnum

from ..invariants.models import AtomicPredicate
from ..st.models import Expr, Program


class Direction(StrEnum):
    UP = "up"
    DOWN = "down"


class Extreme(StrEnum):
    MIN = "min"
    MAX = "max"


class SynthMode(StrEnum):
    SIGN_CONSISTENT = "sign_consistent"
    PAPER_LITERAL = "paper_literal"


class PayloadTerm(StrEnum):
    BOTH = "both"
    HAZARD = "hazard"
    DISRUPTION = "disruption"


@dataclass(frozen=True, slots=True)
class TermSpec:
    condition: Expr
    actuator_value: int


@dataclass(frozen=True, slots=True)
class AttackTerms:
    actuator: str
    disruption: TermSpec  # (not P) with the actuator held at its safe value
    hazard: TermSpec  # P with the actuator held at its unsafe value

    def disruption_active(self, p: bool, u: int) -> bool:
        return not p and u == self.disruption.actuator_value

    def hazard_active(self, p: bool, u: int) -> bool:
        return p and u == self.hazard.actuator_value


@dataclass(frozen=True, slots=True)
class DriverCommand:
    controller: str
    forced: Extreme
    forced_value: float
    out_target: str
    target_atom: AtomicPredicate


@dataclass(frozen=True, slots=True)
class DirectEnforcement:
    variable: str
    value: float
    target_atom: AtomicPredicate


@dataclass(frozen=True, slots=True)
class UnreachableAtom:
    atom: AtomicPredicate
    reason: str


@dataclass(frozen=True, slots=True)
class DriverPlan:
    commands: tuple[DriverCommand, ...] = ()
    direct_enforcements: tuple[DirectEnforcement, ...] = ()
    unreachable: tuple[UnreachableAtom, ...] = ()
    mode: SynthMode = SynthMode.SIGN_CONSISTENT
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def atom_count(self) -> int:
        return (
            len(self.commands) + len(self.direct_enforcements) + len(self.unreachable)
        )

    @property
    def drivable(self) -> bool:
        return bool(self.commands or self.direct_enforcements)


@dataclass(frozen=True, slots=True)
class AttackArtifacts:
    f_ms: Program
    f_mc: Program
    plan: DriverPlan
