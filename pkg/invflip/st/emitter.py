"""
This module stores the canonical pretty-printer for `Program` ASTs
"""

from .models import (
    And,
    Assign,
    BoolConst,
    Comparison,
    DataType,
    Expr,
    IfStmt,
    Not,
    Or,
    PidCall,
    Program,
    RealConst,
    Stmt,
    VarDecl,
    VarRef,
)

INDENT = "  "

# Higher binds tighter: NOT > AND > OR
_PRECEDENCE = {Or: 1, And: 2}


def emit_program(program: Program) -> str:
    """
    Renders a program as canonical structured text.

    Two-space indentation, one statement per line, every comparison wrapped
    in parentheses and explicit kinds on every declaration, so that parsing
    the output yields a structurally equal program.
    """
    lines = [f"PROGRAM {program.name}"]
    if program.decls:
        lines.append("VAR")
        lines.extend(INDENT + emit_decl(decl) for decl in program.decls)
        lines.append("END_VAR")
    for stmt in program.stmts:
        _emit_stmt(stmt, 1, lines)
    lines.append("END_PROGRAM")
    return "\n".join(lines) + "\n"


def emit_decl(decl: VarDecl) -> str:
    text = f"{decl.name} : {decl.dtype}"
    if decl.init is not None:
        text += f" := {decl.init}"
    text += ";"
    if decl.dtype is DataType.PID or decl.kind is None:
        return text
    pragma = f"kind := {decl.kind}"
    if decl.unit is not None:
        pragma += f', unit := "{decl.unit}"'
    return f"{{{pragma}}} {text}"


def _emit_stmt(stmt: Stmt, depth: int, lines: list[str]) -> None:
    pad = INDENT * depth
    match stmt:
        case Assign():
            lines.append(f"{pad}{stmt.target} := {emit_expr(stmt.value)};")
        case IfStmt():
            lines.append(f"{pad}IF {emit_expr(stmt.cond)} THEN")
            for child in stmt.then_body:
                _emit_stmt(child, depth + 1, lines)
            if stmt.else_body is not None:
                lines.append(f"{pad}ELSE")
                for child in stmt.else_body:
                    _emit_stmt(child, depth + 1, lines)
            lines.append(f"{pad}END_IF;")
        case PidCall():
            args = [f"{key} := {value}" for key, value in stmt.params]
            if stmt.out_target is not None:
                args.append(f"OUT => {stmt.out_target}")
            lines.append(f"{pad}{stmt.instance}({', '.join(args)});")


def emit_expr(expr: Expr) -> str:
    match expr:
        case Comparison():
            return f"({expr.var} {expr.op} {expr.threshold})"
        case BoolConst():
            return str(expr.value)
        case RealConst():
            return expr.text
        case VarRef():
            return expr.name
        case Not():
            operand = emit_expr(expr.operand)
            if isinstance(expr.operand, (And, Or)):
                operand = f"({operand})"
            return f"NOT {operand}"
        case And() | Or():
            keyword = "AND" if isinstance(expr, And) else "OR"
            level = _PRECEDENCE[type(expr)]
            left = emit_expr(expr.left)
            right = emit_expr(expr.right)
            # left-associative parse: only a looser left child needs parentheses,
            # the right child also needs them at equal precedence
            if _binds_looser(expr.left, level, strict=True):
                left = f"({left})"
            if _binds_looser(expr.right, level, strict=False):
                right = f"({right})"
            return f"{left} {keyword} {right}"
    raise AssertionError(f"unhandled expression {expr!r}")


def _binds_looser(expr: Expr, level: int, strict: bool) -> bool:
    child = _PRECEDENCE.get(type(expr))
    if child is None:
        return False
    return child < level if strict else child <= level
