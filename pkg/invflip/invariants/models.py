"""
This module stores the extracted safety invariant and controller types
"""

from dataclasses import dataclass, field
from enum import StrEnum

from ..st.models import CmpOp, DataType, Expr, Span, VarKind


class Action(StrEnum):
    DIRECT = "DIRECT"
    REVERSE = "REVERSE"


class BindingKind(StrEnum):
    CONTROLLER = "controller"
    DIRECT_ENFORCE = "direct_enforce"
    UNREACHABLE = "unreachable"


@dataclass(frozen=True, slots=True)
class SafetyInvariant:
    predicate: Expr  # P(x)
    actuator: str  # u
    then_value: int  # value assigned while P holds (the safe value)
    else_value: int | None
    stmt_index: int  # position of the IF among the program's top-level statements
    source_span: Span | None = field(default=None, compare=False)
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def implication_only(self) -> bool:
        return self.else_value is None

    @property
    def safe_value(self) -> int:
        return self.then_value

    @property
    def unsafe_value(self) -> int:
        return 1 - self.then_value


@dataclass(frozen=True, slots=True)
class SkippedBlock:
    stmt_index: int
    reason: str
    source_span: Span | None = None


@dataclass(frozen=True, slots=True)
class InvariantScan:
    invariants: tuple[SafetyInvariant, ...]
    skipped: tuple[SkippedBlock, ...]


@dataclass(frozen=True, slots=True)
class AtomicPredicate:
    var: str
    op: CmpOp
    threshold: float
    var_kind: VarKind
    dtype: DataType = DataType.REAL
    unit: str | None = None

    def __str__(self) -> str:
        unit = self.unit or ""
        return f"{self.var} {self.op} {self.threshold:g}{unit}"


@dataclass(frozen=True, slots=True)
class PidConfig:
    instance_id: str  # C_x
    pv: str
    sp: float
    kp: float
    ki: float  # 1/s
    kd: float  # s
    action: Action
    out_min: float
    out_max: float
    out_target: str  # u_x


@dataclass(frozen=True, slots=True)
class ControllerBinding:
    atom: AtomicPredicate
    mechanism: BindingKind
    controller: PidConfig | None = None
    reason: str | None = None
