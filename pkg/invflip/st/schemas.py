"""
Pydantic schemas for the parsed-program JSON dump (stable field names:
program/decls/stmts, node-tagged statements and expressions).
"""

from typing import Any

from pydantic import BaseModel, Field

from .models import (
    And,
    Assign,
    BoolConst,
    Comparison,
    Expr,
    IfStmt,
    Not,
    Or,
    PidCall,
    Program,
    RealConst,
    Stmt,
    VarRef,
)


# OUTPUT SCHEMAS
class DeclOut(BaseModel):
    name: str
    dtype: str
    kind: str | None = Field(description="Variable kind; null for PID instances")
    init: str | None = Field(default=None, description="Initializer as written")
    unit: str | None = None


class ProgramOut(BaseModel):
    program: str = Field(description="PROGRAM name")
    decls: list[DeclOut]
    stmts: list[dict[str, Any]] = Field(
        description="Statements as node-tagged objects, in source order"
    )

    @classmethod
    def from_program(cls, program: Program) -> "ProgramOut":
        return cls(
            program=program.name,
            decls=[
                DeclOut(
                    name=decl.name,
                    dtype=str(decl.dtype),
                    kind=str(decl.kind) if decl.kind else None,
                    init=decl.init,
                    unit=decl.unit,
                )
                for decl in program.decls
            ],
            stmts=[dump_stmt(stmt) for stmt in program.stmts],
        )


def dump_stmt(stmt: Stmt) -> dict[str, Any]:
    match stmt:
        case Assign():
            return {
                "node": "assign",
                "target": stmt.target,
                "value": dump_expr(stmt.value),
            }
        case IfStmt():
            return {
                "node": "if",
                "cond": dump_expr(stmt.cond),
                "then": [dump_stmt(s) for s in stmt.then_body],
                "else": (
                    [dump_stmt(s) for s in stmt.else_body]
                    if stmt.else_body is not None
                    else None
                ),
            }
        case PidCall():
            return {
                "node": "pid_call",
                "instance": stmt.instance,
                "params": dict(stmt.params),
                "out": stmt.out_target,
            }
    raise AssertionError(f"unhandled statement {stmt!r}")


def dump_expr(expr: Expr) -> dict[str, Any]:
    match expr:
        case Comparison():
            return {
                "node": "cmp",
                "var": expr.var,
                "op": str(expr.op),
                "threshold": expr.threshold,
            }
        case BoolConst():
            return {"node": "bool", "value": expr.value}
        case RealConst():
            return {"node": "real", "value": expr.text}
        case VarRef():
            return {"node": "var", "name": expr.name}
        case Not():
            return {"node": "not", "operand": dump_expr(expr.operand)}
        case And():
            return {
                "node": "and",
                "left": dump_expr(expr.left),
                "right": dump_expr(expr.right),
            }
        case Or():
            return {
                "node": "or",
                "left": dump_expr(expr.left),
                "right": dump_expr(expr.right),
            }
    raise AssertionError(f"unhandled expression {expr!r}")
