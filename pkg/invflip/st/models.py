"""
This module stores the AST node types of the structured-text subset
"""

from dataclasses import dataclass, field
from enum import StrEnum


class Role(StrEnum):
    SAFETY = "safety"
    CONTROL = "control"


class DataType(StrEnum):
    BOOL = "BOOL"
    REAL = "REAL"
    PID = "PID"


class VarKind(StrEnum):
    PHYSICAL = "physical"
    ENVIRONMENTAL = "environmental"
    OPERATOR = "operator"
    ACTUATOR = "actuator"


class CmpOp(StrEnum):
    LT = "<"
    GT = ">"
    LE = "<="
    GE = ">="
    EQ = "="
    NE = "<>"

    def negated(self) -> "CmpOp":
        return _NEGATED[self]


_NEGATED = {
    CmpOp.LT: CmpOp.GE,
    CmpOp.GE: CmpOp.LT,
    CmpOp.GT: CmpOp.LE,
    CmpOp.LE: CmpOp.GT,
    CmpOp.EQ: CmpOp.NE,
    CmpOp.NE: CmpOp.EQ,
}


@dataclass(frozen=True, slots=True)
class Span:
    line: int
    column: int


@dataclass(frozen=True, slots=True)
class SourceFile:
    path: str
    body: str
    role: Role


# EXPRESSIONS
@dataclass(frozen=True, slots=True)
class Comparison:
    var: str
    op: CmpOp
    threshold: str  # literal text as written

    @property
    def value(self) -> float:
        return float(self.threshold)


@dataclass(frozen=True, slots=True)
class BoolConst:
    value: int  # 0 or 1


@dataclass(frozen=True, slots=True)
class RealConst:
    text: str

    @property
    def value(self) -> float:
        return float(self.text)


@dataclass(frozen=True, slots=True)
class VarRef:
    name: str


@dataclass(frozen=True, slots=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Not:
    operand: "Expr"


Expr = Comparison | BoolConst | RealConst | VarRef | And | Or | Not


# STATEMENTS
@dataclass(frozen=True, slots=True)
class Assign:
    target: str
    value: Expr
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class IfStmt:
    cond: Expr
    then_body: tuple["Stmt", ...]
    else_body: tuple["Stmt", ...] | None = None
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class PidCall:
    instance: str
    params: tuple[tuple[str, str], ...]  # (NAME, literal or identifier text)
    out_target: str | None
    span: Span | None = field(default=None, compare=False, repr=False)

    def param(self, name: str) -> str | None:
        for key, value in self.params:
            if key == name:
                return value
        return None


Stmt = IfStmt | Assign | PidCall


@dataclass(frozen=True, slots=True)
class VarDecl:
    name: str
    dtype: DataType
    kind: VarKind | None  # None only for PID instances
    init: str | None = None
    unit: str | None = None
    span: Span | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True, slots=True)
class Program:
    name: str
    decls: tuple[VarDecl, ...] = ()
    stmts: tuple[Stmt, ...] = ()

    @property
    def symbols(self) -> dict[str, VarDecl]:
        return {decl.name: decl for decl in self.decls}
