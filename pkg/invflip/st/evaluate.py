"""
This module stores expression evaluation and negation folding helpers
"""

from collections.abc import Mapping

from .models import (
    And,
    BoolConst,
    CmpOp,
    Comparison,
    Expr,
    Not,
    Or,
    RealConst,
    VarRef,
)


def compare(value: float, op: CmpOp, threshold: float) -> bool:
    match op:
        case CmpOp.LT:
            return value < threshold
        case CmpOp.GT:
            return value > threshold
        case CmpOp.LE:
            return value <= threshold
        case CmpOp.GE:
            return value >= threshold
        case CmpOp.EQ:
            return value == threshold
        case CmpOp.NE:
            return value != threshold


def evaluate(expr: Expr, env: Mapping[str, float]) -> float:
    """
    Evaluates an expression over a tag table.

    Booleans come back as 0.0/1.0 so a result can be stored straight into
    the table. Raises `KeyError` for identifiers missing from `env`.
    """
    match expr:
        case BoolConst():
            return float(expr.value)
        case RealConst():
            return expr.value
        case VarRef():
            return env[expr.name]
        case Comparison():
            return float(compare(env[expr.var], expr.op, expr.value))
        case Not():
            return float(not truth(expr.operand, env))
        case And():
            return float(truth(expr.left, env) and truth(expr.right, env))
        case Or():
            return float(truth(expr.left, env) or truth(expr.right, env))
    raise AssertionError(f"unhandled expression {expr!r}")


def truth(expr: Expr, env: Mapping[str, float]) -> bool:
    return evaluate(expr, env) != 0.0


def push_negations(expr: Expr, negate: bool = False) -> Expr:
    """
    Moves every NOT down to the leaves (negation normal form).

    A NOT over a comparison is folded into the opposite operator; a NOT over
    a bare variable stays as `Not(VarRef)`.
    """
    match expr:
        case Not():
            return push_negations(expr.operand, not negate)
        case Comparison():
            if negate:
                return Comparison(expr.var, expr.op.negated(), expr.threshold)
            return expr
        case And():
            left = push_negations(expr.left, negate)
            right = push_negations(expr.right, negate)
            return Or(left, right) if negate else And(left, right)
        case Or():
            left = push_negations(expr.left, negate)
            right = push_negations(expr.right, negate)
            return And(left, right) if negate else Or(left, right)
        case BoolConst():
            return BoolConst(1 - expr.value) if negate else expr
        case _:
            return Not(expr) if negate else expr


def leaves(expr: Expr) -> list[Expr]:
    """Returns the leaves of an expression, left to right; `NOT var` is one leaf."""
    match expr:
        case And() | Or():
            return leaves(expr.left) + leaves(expr.right)
        case Not(operand=VarRef()):
            return [expr]
        case Not():
            return leaves(expr.operand)
        case _:
            return [expr]


def variables(expr: Expr) -> set[str]:
    names: set[str] = set()
    for leaf in leaves(expr):
        match leaf:
            case Comparison():
                names.add(leaf.var)
            case VarRef():
                names.add(leaf.name)
            case Not(operand=VarRef(name=name)):
                names.add(name)
    return names
