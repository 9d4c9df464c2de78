"""
This module stores the main business logic for extracting invariants,
atomic predicates and PID configurations from parsed programs
"""

import logging
import math
from collections.abc import Iterator, Mapping

from ..errors import (
    DuplicatePv,
    InvalidParam,
    MissingParam,
    NoInvariantFound,
    UnsupportedAtom,
)
from ..st.evaluate import leaves, push_negations, variables
from ..st.models import (
    Assign,
    BoolConst,
    CmpOp,
    Comparison,
    DataType,
    Expr,
    IfStmt,
    Not,
    PidCall,
    Program,
    Stmt,
    VarDecl,
    VarKind,
    VarRef,
)
from .models import (
    Action,
    AtomicPredicate,
    BindingKind,
    ControllerBinding,
    InvariantScan,
    PidConfig,
    SafetyInvariant,
    SkippedBlock,
)

log = logging.getLogger(__name__)

PID_PARAMS = ("PV", "SP", "KP", "KI", "KD", "ACTION", "OUT_MIN", "OUT_MAX")


def scan_invariants(program: Program) -> InvariantScan:
    """
    Searches the top-level IF blocks of a safety program for invariants.

    A block qualifies when its THEN branch assigns a boolean constant to
    exactly one actuator and its ELSE branch, if present, assigns the
    complement to the same actuator. Every other IF is returned as skipped
    with the reason.
    """
    symbols = program.symbols
    invariants: list[SafetyInvariant] = []
    skipped: list[SkippedBlock] = []
    for index, stmt in enumerate(program.stmts):
        if not isinstance(stmt, IfStmt):
            continue
        result = _match_invariant(stmt, index, symbols)
        if isinstance(result, str):
            skipped.append(SkippedBlock(index, result, stmt.span))
        else:
            invariants.append(result)
    return InvariantScan(invariants=tuple(invariants), skipped=tuple(skipped))


def extract_invariants(program: Program) -> list[SafetyInvariant]:
    """
    Returns one `SafetyInvariant` per qualifying top-level IF, in source order.

    Raises:
        NoInvariantFound: If no IF block matches the invariant pattern.
    """
    scan = scan_invariants(program)
    for block in scan.skipped:
        log.warning(
            "Skipped IF block",
            extra={
                "program": program.name,
                "stmt_index": block.stmt_index,
                "reason": block.reason,
            },
        )
    if not scan.invariants:
        raise NoInvariantFound(
            f"program {program.name} has no IF block assigning boolean constants "
            "to a single actuator"
        )
    return list(scan.invariants)


def _match_invariant(
    stmt: IfStmt, index: int, symbols: Mapping[str, VarDecl]
) -> SafetyInvariant | str:
    branches = [stmt.then_body]
    if stmt.else_body is not None:
        branches.append(stmt.else_body)
    if any(isinstance(s, IfStmt) for branch in branches for s in branch):
        return "nested IF inside a branch"

    then_assigns = _actuator_constants(stmt.then_body, symbols)
    if len(then_assigns) != 1:
        return "THEN branch must assign a boolean constant to exactly one actuator"
    actuator, then_value = then_assigns[0]

    else_value: int | None = None
    if stmt.else_body is not None:
        else_assigns = _actuator_constants(stmt.else_body, symbols)
        if len(else_assigns) != 1:
            return "ELSE branch must assign a boolean constant to exactly one actuator"
        else_actuator, else_value = else_assigns[0]
        if else_actuator != actuator:
            return f"branches drive different actuators ({actuator}, {else_actuator})"
        if else_value == then_value:
            return f"both branches assign {actuator} := {then_value}"

    writes = sum(
        1
        for branch in branches
        for s in branch
        if isinstance(s, Assign) and s.target == actuator
    )
    if writes != len(branches):
        return f"{actuator} is assigned more than once in a branch"

    read_actuators = sorted(
        name
        for name in variables(stmt.cond)
        if symbols[name].kind is VarKind.ACTUATOR
    )
    if read_actuators:
        return f"condition reads actuator variables {', '.join(read_actuators)}"

    return SafetyInvariant(
        predicate=stmt.cond,
        actuator=actuator,
        then_value=then_value,
        else_value=else_value,
        stmt_index=index,
        source_span=stmt.span,
    )


def _actuator_constants(
    body: tuple[Stmt, ...], symbols: Mapping[str, VarDecl]
) -> list[tuple[str, int]]:
    found: list[tuple[str, int]] = []
    for stmt in body:
        if not (isinstance(stmt, Assign) and isinstance(stmt.value, BoolConst)):
            continue
        decl = symbols[stmt.target]
        if decl.dtype is DataType.BOOL and decl.kind is VarKind.ACTUATOR:
            found.append((stmt.target, stmt.value.value))
    return found


def atomize(predicate: Expr, symbols: Mapping[str, VarDecl]) -> list[AtomicPredicate]:
    """
    Splits P(x) into its atomic predicates, left to right.

    Negations are pushed to the leaves first, so `NOT (x1 < 10)` becomes
    `x1 >= 10`. A bare BOOL operator or environmental variable becomes
    `var > 0` (`var <= 0` under NOT).

    Raises:
        UnsupportedAtom: For equality comparisons, boolean leaves over
            physical or actuator variables, and undeclared variables.
    """
    atoms: list[AtomicPredicate] = []
    for leaf in leaves(push_negations(predicate)):
        match leaf:
            case Comparison():
                if leaf.op in (CmpOp.EQ, CmpOp.NE):
                    raise UnsupportedAtom(
                        f"equality comparison on {leaf.var} cannot be driven"
                    )
                decl = _declared(leaf.var, symbols)
                atoms.append(
                    AtomicPredicate(
                        var=leaf.var,
                        op=leaf.op,
                        threshold=leaf.value,
                        var_kind=_state_kind(decl),
                        dtype=decl.dtype,
                        unit=decl.unit,
                    )
                )
            case VarRef(name=name):
                atoms.append(_flag_atom(name, CmpOp.GT, symbols))
            case Not(operand=VarRef(name=name)):
                atoms.append(_flag_atom(name, CmpOp.LE, symbols))
            case BoolConst():
                continue
            case _:
                raise UnsupportedAtom(f"unsupported predicate leaf {leaf!r}")
    return atoms


def _flag_atom(
    name: str, op: CmpOp, symbols: Mapping[str, VarDecl]
) -> AtomicPredicate:
    decl = _declared(name, symbols)
    if decl.kind not in (VarKind.OPERATOR, VarKind.ENVIRONMENTAL):
        raise UnsupportedAtom(f"boolean leaf {name} is a {decl.kind} variable")
    return AtomicPredicate(
        var=name,
        op=op,
        threshold=0.0,
        var_kind=decl.kind,
        dtype=decl.dtype,
        unit=decl.unit,
    )


def _declared(name: str, symbols: Mapping[str, VarDecl]) -> VarDecl:
    decl = symbols.get(name)
    if decl is None:
        raise UnsupportedAtom(f"{name} is not declared")
    return decl


def _state_kind(decl: VarDecl) -> VarKind:
    if decl.kind is None or decl.kind is VarKind.ACTUATOR:
        raise UnsupportedAtom(f"{decl.name} is not a state variable")
    return decl.kind


def _pid_calls(stmts: tuple[Stmt, ...]) -> Iterator[PidCall]:
    for stmt in stmts:
        match stmt:
            case PidCall():
                yield stmt
            case IfStmt():
                yield from _pid_calls(stmt.then_body)
                if stmt.else_body:
                    yield from _pid_calls(stmt.else_body)


def pid_config_from_call(call: PidCall) -> PidConfig:
    """
    Builds the configuration of one PID call from its named parameters.

    Raises:
        MissingParam: If a required parameter or the OUT binding is absent.
        InvalidParam: If a value is malformed or the output limits are inverted.
    """
    values: dict[str, str] = {}
    for name in PID_PARAMS:
        value = call.param(name)
        if value is None:
            raise MissingParam(call.instance, name)
        values[name] = value
    if call.out_target is None:
        raise MissingParam(call.instance, "OUT")

    def number(name: str) -> float:
        try:
            result = float(values[name])
        except ValueError:
            raise InvalidParam(
                f"{call.instance}.{name} must be a number, got {values[name]}"
            )
        if not math.isfinite(result):
            raise InvalidParam(f"{call.instance}.{name} must be finite")
        return result

    try:
        action = Action(values["ACTION"].upper())
    except ValueError:
        raise InvalidParam(
            f"{call.instance}.ACTION must be DIRECT or REVERSE, got {values['ACTION']}"
        )
    if not values["PV"].isidentifier():
        raise InvalidParam(f"{call.instance}.PV must name a variable")

    config = PidConfig(
        instance_id=call.instance,
        pv=values["PV"],
        sp=number("SP"),
        kp=number("KP"),
        ki=number("KI"),
        kd=number("KD"),
        action=action,
        out_min=number("OUT_MIN"),
        out_max=number("OUT_MAX"),
        out_target=call.out_target,
    )
    if not config.out_min < config.out_max:
        raise InvalidParam(
            f"{call.instance}: OUT_MIN ({config.out_min}) must be below "
            f"OUT_MAX ({config.out_max})"
        )
    return config


def extract_controllers(program: Program) -> list[PidConfig]:
    """
    Returns one `PidConfig` per PID call of a control program.

    Raises:
        MissingParam: If a call lacks a required parameter.
        DuplicatePv: If two controllers claim the same process variable.
    """
    controllers: list[PidConfig] = []
    owners: dict[str, str] = {}
    for call in _pid_calls(program.stmts):
        config = pid_config_from_call(call)
        if config.pv in owners:
            raise DuplicatePv(config.pv, owners[config.pv], config.instance_id)
        owners[config.pv] = config.instance_id
        controllers.append(config)
    return controllers


def bind_controllers(
    atoms: list[AtomicPredicate], ctrls: list[PidConfig]
) -> list[ControllerBinding]:
    """Pairs each atom with the mechanism an attacker can use to make it true."""
    by_pv = {ctrl.pv: ctrl for ctrl in ctrls}
    bindings: list[ControllerBinding] = []
    for atom in atoms:
        match atom.var_kind:
            case VarKind.OPERATOR:
                binding = ControllerBinding(atom, BindingKind.DIRECT_ENFORCE)
            case VarKind.ENVIRONMENTAL:
                binding = ControllerBinding(
                    atom, BindingKind.UNREACHABLE, reason="environmental"
                )
            case _ if atom.var in by_pv:
                binding = ControllerBinding(
                    atom, BindingKind.CONTROLLER, controller=by_pv[atom.var]
                )
            case _:
                binding = ControllerBinding(
                    atom,
                    BindingKind.UNREACHABLE,
                    reason="no controller; dormant attack only",
                )
        bindings.append(binding)
    return bindings
