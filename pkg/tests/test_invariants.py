import itertools
import random

import pytest

from invflip.errors import (
    DuplicatePv,
    InvalidParam,
    MissingParam,
    NoInvariantFound,
    UnsupportedAtom,
)
from invflip.invariants.models import Action, BindingKind
from invflip.invariants.schemas import SpecDump
from invflip.invariants.services import (
    atomize,
    bind_controllers,
    extract_controllers,
    extract_invariants,
    pid_config_from_call,
    scan_invariants,
)
from invflip.sim.engine import execute
from invflip.st.evaluate import leaves, push_negations, truth, variables
from invflip.st.models import (
    And,
    CmpOp,
    Comparison,
    Expr,
    IfStmt,
    Not,
    Or,
    PidCall,
    Program,
    VarKind,
)
from invflip.st.parser import parse_text

from .generators import THRESHOLD, random_invariant_program, satisfying_value


def _program(decls: str, body: str) -> Program:
    return parse_text(f"PROGRAM P\nVAR\n{decls}\nEND_VAR\n{body}\nEND_PROGRAM\n")


def test_fixture_invariant(pump_safety: Program) -> None:
    (inv,) = extract_invariants(pump_safety)
    assert isinstance(inv.predicate, Or)
    assert inv.actuator == "u"
    assert (inv.then_value, inv.else_value) == (0, 1)
    assert inv.safe_value == 0 and inv.unsafe_value == 1
    assert not inv.implication_only


def test_one_armed_invariant_is_implication_only(one_armed: Program) -> None:
    (inv,) = extract_invariants(one_armed)
    assert inv.else_value is None
    assert inv.implication_only


def test_program_without_if_has_no_invariant() -> None:
    program = _program("{kind := actuator} u : BOOL;", "u := 1;")
    with pytest.raises(NoInvariantFound):
        extract_invariants(program)


@pytest.mark.parametrize(
    ("body", "reason"),
    [
        (
            "IF (x < 1.0) THEN IF (x < 0.5) THEN u := 0; END_IF; END_IF;",
            "nested IF",
        ),
        ("IF (x < 1.0) THEN x := 2.0; ELSE u := 1; END_IF;", "THEN branch"),
        ("IF (x < 1.0) THEN u := 0; ELSE w := 1; END_IF;", "different actuators"),
        ("IF (x < 1.0) THEN u := 0; ELSE u := 0; END_IF;", "both branches"),
        ("IF (x < 1.0) THEN u := 0; u := 1; ELSE u := 1; END_IF;", "exactly one"),
        ("IF w THEN u := 0; ELSE u := 1; END_IF;", "reads actuator"),
    ],
)
def test_unmatched_if_blocks_are_skipped_with_reason(body: str, reason: str) -> None:
    program = _program(
        "x : REAL;\n{kind := actuator} u : BOOL;\n{kind := actuator} w : BOOL;", body
    )
    scan = scan_invariants(program)
    assert scan.invariants == ()
    (skipped,) = scan.skipped
    assert reason in skipped.reason


def test_two_invariants_are_found_in_order(two_invariants: Program) -> None:
    first, second = extract_invariants(two_invariants)
    assert first.actuator == "u"
    assert second.actuator == "alarm"
    assert second.stmt_index == 2


def test_atomize_fixture(pump_safety: Program) -> None:
    (inv,) = extract_invariants(pump_safety)
    low, high = atomize(inv.predicate, pump_safety.symbols)
    assert (low.var, low.op, low.threshold, low.unit) == ("x1", CmpOp.LT, 10.0, "%")
    assert (high.var, high.op, high.threshold) == ("x2", CmpOp.GT, 5.0)
    assert high.unit == "bar"
    assert low.var_kind is VarKind.PHYSICAL
    assert str(low) == "x1 < 10%"


def test_atomize_pushes_negation_into_operator() -> None:
    program = _program(
        "x : REAL;\n{kind := actuator} u : BOOL;",
        "IF NOT (x < 10.0) THEN u := 0; ELSE u := 1; END_IF;",
    )
    (inv,) = extract_invariants(program)
    (atom,) = atomize(inv.predicate, program.symbols)
    assert (atom.op, atom.threshold) == (CmpOp.GE, 10.0)


def test_atomize_operator_flags(two_invariants: Program) -> None:
    second = extract_invariants(two_invariants)[1]
    flag, env = atomize(second.predicate, two_invariants.symbols)
    assert (flag.var, flag.op, flag.threshold) == ("xo", CmpOp.GT, 0.0)
    assert flag.var_kind is VarKind.OPERATOR
    assert env.var_kind is VarKind.ENVIRONMENTAL


def test_atomize_negated_operator_flag() -> None:
    program = _program(
        "{kind := operator} stop : BOOL;\n{kind := actuator} u : BOOL;",
        "IF NOT stop THEN u := 1; ELSE u := 0; END_IF;",
    )
    (inv,) = extract_invariants(program)
    (atom,) = atomize(inv.predicate, program.symbols)
    assert (atom.var, atom.op) == ("stop", CmpOp.LE)


@pytest.mark.parametrize("cond", ["(x = 10.0)", "(x <> 10.0)", "flag"])
def test_atomize_rejects_unsupported_leaves(cond: str) -> None:
    program = _program(
        "x : REAL;\n{kind := physical} flag : BOOL;\n{kind := actuator} u : BOOL;",
        f"IF {cond} THEN u := 0; ELSE u := 1; END_IF;",
    )
    (inv,) = extract_invariants(program)
    with pytest.raises(UnsupportedAtom):
        atomize(inv.predicate, program.symbols)


def test_extract_controllers(level_control: Program) -> None:
    (cfg,) = extract_controllers(level_control)
    assert cfg.instance_id == "LIC101"
    assert cfg.pv == "x1"
    assert (cfg.sp, cfg.kp, cfg.ki, cfg.kd) == (50.0, 2.0, 0.1, 0.0)
    assert cfg.action is Action.DIRECT
    assert (cfg.out_min, cfg.out_max, cfg.out_target) == (0.0, 100.0, "v1")


FULL_PARAMS = (
    ("PV", "x1"),
    ("SP", "50.0"),
    ("KP", "2.0"),
    ("KI", "0.1"),
    ("KD", "0.0"),
    ("ACTION", "REVERSE"),
    ("OUT_MIN", "0.0"),
    ("OUT_MAX", "100.0"),
)


def test_pid_config_reverse_action() -> None:
    cfg = pid_config_from_call(PidCall("C", FULL_PARAMS, "v1"))
    assert cfg.action is Action.REVERSE


def test_missing_parameter() -> None:
    params = tuple(p for p in FULL_PARAMS if p[0] != "KI")
    with pytest.raises(MissingParam) as excinfo:
        pid_config_from_call(PidCall("C", params, "v1"))
    assert excinfo.value.param == "KI"


def test_missing_out_binding() -> None:
    with pytest.raises(MissingParam) as excinfo:
        pid_config_from_call(PidCall("C", FULL_PARAMS, None))
    assert excinfo.value.param == "OUT"


@pytest.mark.parametrize(
    ("name", "value"),
    [("ACTION", "SIDEWAYS"), ("OUT_MIN", "200.0"), ("PV", "3.0"), ("KP", "kp_var")],
)
def test_invalid_parameters(name: str, value: str) -> None:
    params = tuple((k, value if k == name else v) for k, v in FULL_PARAMS)
    with pytest.raises(InvalidParam):
        pid_config_from_call(PidCall("C", params, "v1"))


def test_duplicate_pv() -> None:
    call = "({args}OUT => {out});"
    args = ", ".join(f"{k} := {v}" for k, v in FULL_PARAMS) + ", "
    program = _program(
        "x1 : REAL;\nv1 : REAL;\nv2 : REAL;\nA : PID;\nB : PID;",
        "A"
        + call.format(args=args, out="v1")
        + "\nB"
        + call.format(args=args, out="v2"),
    )
    with pytest.raises(DuplicatePv):
        extract_controllers(program)


def test_bindings_for_fixture(pump_safety: Program, level_control: Program) -> None:
    (inv,) = extract_invariants(pump_safety)
    atoms = atomize(inv.predicate, pump_safety.symbols)
    low, high = bind_controllers(atoms, extract_controllers(level_control))
    assert low.mechanism is BindingKind.CONTROLLER
    assert low.controller is not None and low.controller.instance_id == "LIC101"
    assert high.mechanism is BindingKind.UNREACHABLE
    assert high.reason is not None and "no controller" in high.reason


def test_bindings_for_operator_and_environment(two_invariants: Program) -> None:
    second = extract_invariants(two_invariants)[1]
    flag, env = bind_controllers(atomize(second.predicate, two_invariants.symbols), [])
    assert flag.mechanism is BindingKind.DIRECT_ENFORCE
    assert env.mechanism is BindingKind.UNREACHABLE
    assert env.reason == "environmental"


def test_spec_dump(pump_safety: Program, level_control: Program) -> None:
    dump = SpecDump.from_programs(pump_safety, level_control).model_dump()
    (inv,) = dump["invariants"]
    assert inv["predicate"] == "(x1 < 10.0) OR (x2 > 5.0)"
    assert [a["var"] for a in inv["atoms"]] == ["x1", "x2"]
    assert dump["controllers"][0]["instance_id"] == "LIC101"
    assert [b["mechanism"] for b in dump["bindings"]] == ["controller", "unreachable"]
    assert dump["skipped"] == []


def _wrap_random_nots(rng: random.Random, expr: Expr) -> Expr:
    match expr:
        case And():
            expr = And(
                _wrap_random_nots(rng, expr.left), _wrap_random_nots(rng, expr.right)
            )
        case Or():
            expr = Or(
                _wrap_random_nots(rng, expr.left), _wrap_random_nots(rng, expr.right)
            )
        case Not():
            expr = Not(_wrap_random_nots(rng, expr.operand))
    for _ in range(rng.choice((0, 0, 1, 2))):
        expr = Not(expr)
    return expr


@pytest.mark.parametrize("index", range(40))
def test_folding_negations_preserves_truth_table(index: int) -> None:
    rng = random.Random(3000 + index)
    program = random_invariant_program(rng, rng.randint(1, 4))
    (block,) = program.stmts
    assert isinstance(block, IfStmt)
    predicate = _wrap_random_nots(rng, block.cond)
    folded = push_negations(predicate)
    assert not any(isinstance(leaf, Not) for leaf in leaves(folded))

    names = sorted(variables(predicate))
    # values below, at and above the threshold so strict and non-strict differ
    samples = (THRESHOLD - 5.0, THRESHOLD, THRESHOLD + 5.0)
    for values in itertools.product(samples, repeat=len(names)):
        env = dict(zip(names, values))
        assert truth(folded, env) == truth(predicate, env)


@pytest.mark.parametrize("n_atoms", range(1, 9))
def test_source_if_reproduces_branch_values(n_atoms: int) -> None:
    rng = random.Random(4000 + n_atoms)
    program = random_invariant_program(rng, n_atoms)
    (inv,) = extract_invariants(program)
    atoms = atomize(inv.predicate, program.symbols)
    assert len(atoms) == n_atoms

    for bits in itertools.product((False, True), repeat=n_atoms):
        env = {
            atom.var: satisfying_value(atom.op, bit) for atom, bit in zip(atoms, bits)
        }
        env["u"] = -1.0
        for atom, bit in zip(atoms, bits):
            leaf = Comparison(atom.var, atom.op, str(atom.threshold))
            assert truth(leaf, env) is bit
        execute(program.stmts, env, lambda call, table: None)
        expected = inv.then_value if truth(inv.predicate, env) else inv.else_value
        assert env["u"] == expected


@pytest.mark.parametrize("value", ["3.0", "-3", "1e3", "TRUE()"])
def test_pv_must_name_a_variable(value: str) -> None:
    params = tuple((k, value if k == "PV" else v) for k, v in FULL_PARAMS)
    with pytest.raises(InvalidParam, match="PV must name a variable"):
        pid_config_from_call(PidCall("C", params, "v1"))


def test_pv_named_like_a_float_literal_is_a_variable() -> None:
    params = tuple((k, "inf" if k == "PV" else v) for k, v in FULL_PARAMS)
    assert pid_config_from_call(PidCall("C", params, "v1")).pv == "inf"
