"""
This module stores the structured-text grammar and the parser that turns
source text into a checked `Program`
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from ..errors import ParseError
from .models import (
    And,
    Assign,
    BoolConst,
    CmpOp,
    Comparison,
    DataType,
    Expr,
    IfStmt,
    Not,
    Or,
    PidCall,
    Program,
    RealConst,
    Role,
    SourceFile,
    Span,
    Stmt,
    VarDecl,
    VarKind,
    VarRef,
)

log = logging.getLogger(__name__)

GRAMMAR = r"""
program: "PROGRAM" NAME var_block* stmt* "END_PROGRAM"

var_block: "VAR" decl* "END_VAR"
decl: pragma? NAME ":" NAME init? ";"
init: ":=" NUMBER
pragma: "{" pragma_item ("," pragma_item)* "}"
pragma_item: NAME ":=" (NAME | STRING)

?stmt: if_stmt
     | assign
     | pid_call

if_stmt: "IF" expr "THEN" stmt* else_clause? "END_IF" ";"
else_clause: "ELSE" stmt*
assign: NAME ":=" expr ";"
pid_call: NAME "(" (pid_arg ("," pid_arg)*)? ")" ";"
pid_arg: NAME ":=" (NAME | NUMBER) -> in_arg
       | NAME "=>" NAME            -> out_arg

?expr: or_expr
?or_expr: and_expr ("OR" and_expr)*
?and_expr: not_expr ("AND" not_expr)*
?not_expr: "NOT" not_expr -> negation
         | atom
?atom: comparison
     | "(" expr ")"
     | NAME   -> var_ref
     | NUMBER -> number
comparison: NAME CMP_OP NUMBER

CMP_OP: /<=|>=|<>|<|>|=/
NAME: /[A-Za-z_][A-Za-z0-9_]*/
NUMBER: /-?\d+(\.\d+)?([eE][-+]?\d+)?/
COMMENT: /\(\*[\s\S]*?\*\)/

%import common.ESCAPED_STRING -> STRING
%import common.WS
%ignore WS
%ignore COMMENT
"""

_lark = Lark(GRAMMAR, start="program", parser="lalr", propagate_positions=True)


@dataclass(frozen=True, slots=True)
class _Else:
    body: tuple[Stmt, ...]


@dataclass(frozen=True, slots=True)
class _Pragma:
    kind: VarKind | None
    unit: str | None


def _span(meta: Any) -> Span:
    return Span(line=getattr(meta, "line", 1), column=getattr(meta, "column", 1))


def _token_span(token: Token) -> Span:
    return Span(line=token.line or 1, column=token.column or 1)


@v_args(meta=True)
class _AstBuilder(Transformer):
    """Builds unchecked AST nodes; number literals all start as `RealConst`."""

    def program(self, meta: Any, children: list[Any]) -> Program:
        name = str(children[0])
        decls: list[VarDecl] = []
        stmts: list[Stmt] = []
        for child in children[1:]:
            if isinstance(child, list):
                decls.extend(child)
            else:
                stmts.append(child)
        return Program(name=name, decls=tuple(decls), stmts=tuple(stmts))

    def var_block(self, meta: Any, children: list[VarDecl]) -> list[VarDecl]:
        return list(children)

    def decl(self, meta: Any, children: list[Any]) -> VarDecl:
        pragma = _Pragma(kind=None, unit=None)
        if isinstance(children[0], _Pragma):
            pragma, children = children[0], children[1:]
        name, type_token = children[0], children[1]
        init = str(children[2]) if len(children) > 2 else None
        try:
            dtype = DataType(str(type_token))
        except ValueError:
            span = _token_span(type_token)
            raise ParseError(
                f"unknown type {type_token}",
                span.line,
                span.column,
                expected="BOOL, REAL or PID",
            )
        return VarDecl(
            name=str(name),
            dtype=dtype,
            kind=pragma.kind,
            init=init,
            unit=pragma.unit,
            span=_token_span(name),
        )

    def init(self, meta: Any, children: list[Token]) -> Token:
        return children[0]

    def pragma(self, meta: Any, children: list[tuple[Token, Token]]) -> _Pragma:
        kind: VarKind | None = None
        unit: str | None = None
        for key, value in children:
            match str(key):
                case "kind":
                    try:
                        kind = VarKind(str(value))
                    except ValueError:
                        raise ParseError(
                            f"unknown variable kind {value}",
                            value.line or 1,
                            value.column or 1,
                            expected="physical, environmental, operator or actuator",
                        )
                case "unit" if value.type == "STRING":
                    unit = str(value)[1:-1]
                case _:
                    raise ParseError(
                        f"unsupported pragma entry {key}",
                        key.line or 1,
                        key.column or 1,
                        expected="kind := <kind> or unit := \"<text>\"",
                    )
        return _Pragma(kind=kind, unit=unit)

    def pragma_item(self, meta: Any, children: list[Token]) -> tuple[Token, Token]:
        return children[0], children[1]

    def if_stmt(self, meta: Any, children: list[Any]) -> IfStmt:
        cond, rest = children[0], children[1:]
        else_body: tuple[Stmt, ...] | None = None
        if rest and isinstance(rest[-1], _Else):
            else_body = rest[-1].body
            rest = rest[:-1]
        return IfStmt(
            cond=cond, then_body=tuple(rest), else_body=else_body, span=_span(meta)
        )

    def else_clause(self, meta: Any, children: list[Stmt]) -> _Else:
        return _Else(body=tuple(children))

    def assign(self, meta: Any, children: list[Any]) -> Assign:
        return Assign(target=str(children[0]), value=children[1], span=_span(meta))

    def pid_call(self, meta: Any, children: list[Any]) -> PidCall:
        instance = str(children[0])
        params: list[tuple[str, str]] = []
        out_target: str | None = None
        for arg in children[1:]:
            kind, key, value = arg
            if kind == "out":
                if out_target is not None:
                    raise ParseError(
                        f"PID call {instance} binds OUT more than once",
                        key.line or 1,
                        key.column or 1,
                    )
                out_target = str(value)
            else:
                if any(existing == str(key) for existing, _ in params):
                    raise ParseError(
                        f"PID call {instance} repeats parameter {key}",
                        key.line or 1,
                        key.column or 1,
                    )
                params.append((str(key), str(value)))
        return PidCall(
            instance=instance,
            params=tuple(params),
            out_target=out_target,
            span=_span(meta),
        )

    def in_arg(self, meta: Any, children: list[Token]) -> tuple[str, Token, Token]:
        return ("in", children[0], children[1])

    def out_arg(self, meta: Any, children: list[Token]) -> tuple[str, Token, Token]:
        if str(children[0]) != "OUT":
            raise ParseError(
                f"output binding {children[0]} is not supported",
                children[0].line or 1,
                children[0].column or 1,
                expected="OUT",
            )
        return ("out", children[0], children[1])

    def or_expr(self, meta: Any, children: list[Expr]) -> Expr:
        result = children[0]
        for child in children[1:]:
            result = Or(result, child)
        return result

    def and_expr(self, meta: Any, children: list[Expr]) -> Expr:
        result = children[0]
        for child in children[1:]:
            result = And(result, child)
        return result

    def negation(self, meta: Any, children: list[Expr]) -> Expr:
        return Not(children[0])

    def var_ref(self, meta: Any, children: list[Token]) -> Expr:
        return VarRef(str(children[0]))

    def number(self, meta: Any, children: list[Token]) -> Expr:
        return RealConst(str(children[0]))

    def comparison(self, meta: Any, children: list[Token]) -> Expr:
        return Comparison(
            var=str(children[0]), op=CmpOp(str(children[1])), threshold=str(children[2])
        )


_builder = _AstBuilder()


class _Resolver:
    """
    Checks a freshly built program against the declaration table.

    Fills in default variable kinds, turns `0`/`1` literals in boolean
    positions into `BoolConst` and rejects duplicate declarations,
    undeclared identifiers and type mismatches.
    """

    def __init__(self, program: Program) -> None:
        self.program = program
        self.symbols: dict[str, VarDecl] = {}

    def resolve(self) -> Program:
        raw: dict[str, VarDecl] = {}
        for decl in self.program.decls:
            if decl.name in raw:
                raise self._error(f"duplicate declaration of {decl.name}", decl.span)
            raw[decl.name] = decl

        if_targets: set[str] = set()
        out_targets: set[str] = set()
        _collect_targets(self.program.stmts, False, if_targets, out_targets)
        self.symbols = {
            name: self._resolve_decl(decl, if_targets, out_targets)
            for name, decl in raw.items()
        }
        stmts = tuple(self._stmt(stmt) for stmt in self.program.stmts)
        return Program(
            name=self.program.name,
            decls=tuple(self.symbols[decl.name] for decl in self.program.decls),
            stmts=stmts,
        )

    def _resolve_decl(
        self, decl: VarDecl, if_targets: set[str], out_targets: set[str]
    ) -> VarDecl:
        if decl.dtype is DataType.PID:
            if decl.kind is not None or decl.init is not None or decl.unit is not None:
                raise self._error(
                    f"PID instance {decl.name} takes no pragma or initial value",
                    decl.span,
                )
            return decl
        if decl.init is not None and decl.dtype is DataType.BOOL:
            if decl.init not in ("0", "1"):
                raise self._error(
                    f"BOOL variable {decl.name} initialised with {decl.init}",
                    decl.span,
                    expected="0 or 1",
                )
        if decl.kind is not None:
            return decl
        if decl.dtype is DataType.BOOL:
            kind = VarKind.ACTUATOR if decl.name in if_targets else VarKind.PHYSICAL
        else:
            kind = VarKind.ACTUATOR if decl.name in out_targets else VarKind.PHYSICAL
        return VarDecl(
            name=decl.name,
            dtype=decl.dtype,
            kind=kind,
            init=decl.init,
            unit=decl.unit,
            span=decl.span,
        )

    def _stmt(self, stmt: Stmt) -> Stmt:
        match stmt:
            case IfStmt():
                return IfStmt(
                    cond=self._expr(stmt.cond, DataType.BOOL, stmt.span),
                    then_body=tuple(self._stmt(s) for s in stmt.then_body),
                    else_body=(
                        tuple(self._stmt(s) for s in stmt.else_body)
                        if stmt.else_body is not None
                        else None
                    ),
                    span=stmt.span,
                )
            case Assign():
                target = self._lookup(stmt.target, stmt.span)
                if target.dtype is DataType.PID:
                    raise self._error(
                        f"cannot assign to PID instance {stmt.target}", stmt.span
                    )
                return Assign(
                    target=stmt.target,
                    value=self._expr(stmt.value, target.dtype, stmt.span),
                    span=stmt.span,
                )
            case PidCall():
                instance = self._lookup(stmt.instance, stmt.span)
                if instance.dtype is not DataType.PID:
                    raise self._error(
                        f"{stmt.instance} is not a PID instance", stmt.span
                    )
                for key, value in stmt.params:
                    if key == "ACTION" or _is_number(value):
                        continue
                    decl = self._lookup(value, stmt.span)
                    if decl.dtype is not DataType.REAL:
                        raise self._error(
                            f"PID parameter {key} needs a REAL variable, "
                            f"{value} is {decl.dtype}",
                            stmt.span,
                        )
                if stmt.out_target is not None:
                    out = self._lookup(stmt.out_target, stmt.span)
                    if out.dtype is not DataType.REAL:
                        raise self._error(
                            f"PID output {stmt.out_target} must be REAL", stmt.span
                        )
                return stmt
        raise AssertionError(f"unhandled statement {stmt!r}")

    def _expr(self, expr: Expr, want: DataType, span: Span | None) -> Expr:
        match expr:
            case RealConst(text=text):
                if want is DataType.REAL:
                    return expr
                if text in ("0", "1"):
                    return BoolConst(int(text))
                raise self._error(
                    f"expected a boolean, found number {text}", span, expected="0 or 1"
                )
            case BoolConst():
                if want is DataType.BOOL:
                    return expr
                raise self._error("expected a REAL value, found a boolean", span)
            case VarRef(name=name):
                decl = self._lookup(name, span)
                if decl.dtype is not want:
                    raise self._error(
                        f"{name} is {decl.dtype}, expected {want}", span
                    )
                return expr
            case Comparison(var=var):
                if want is not DataType.BOOL:
                    raise self._error("expected a REAL value, found a comparison", span)
                decl = self._lookup(var, span)
                if decl.dtype is not DataType.REAL:
                    raise self._error(
                        f"comparison on {var} needs a REAL variable", span
                    )
                return expr
            case And(left=left, right=right):
                self._require_bool(want, "AND", span)
                return And(
                    self._expr(left, DataType.BOOL, span),
                    self._expr(right, DataType.BOOL, span),
                )
            case Or(left=left, right=right):
                self._require_bool(want, "OR", span)
                return Or(
                    self._expr(left, DataType.BOOL, span),
                    self._expr(right, DataType.BOOL, span),
                )
            case Not(operand=operand):
                self._require_bool(want, "NOT", span)
                return Not(self._expr(operand, DataType.BOOL, span))
        raise AssertionError(f"unhandled expression {expr!r}")

    def _require_bool(self, want: DataType, op: str, span: Span | None) -> None:
        if want is not DataType.BOOL:
            raise self._error(f"{op} yields a boolean, expected {want}", span)

    def _lookup(self, name: str, span: Span | None) -> VarDecl:
        decl = self.symbols.get(name)
        if decl is None:
            raise self._error(f"undeclared identifier {name}", span)
        return decl

    @staticmethod
    def _error(
        message: str, span: Span | None, expected: str | None = None
    ) -> ParseError:
        span = span or Span(1, 1)
        return ParseError(message, span.line, span.column, expected=expected)


def _collect_targets(
    stmts: tuple[Stmt, ...], in_if: bool, if_targets: set[str], out_targets: set[str]
) -> None:
    for stmt in stmts:
        match stmt:
            case IfStmt():
                _collect_targets(stmt.then_body, True, if_targets, out_targets)
                if stmt.else_body:
                    _collect_targets(stmt.else_body, True, if_targets, out_targets)
            case Assign() if in_if:
                if_targets.add(stmt.target)
            case PidCall() if stmt.out_target:
                out_targets.add(stmt.out_target)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _describe_expected(error: UnexpectedInput) -> str | None:
    expected = getattr(error, "expected", None) or getattr(error, "allowed", None)
    if not expected:
        return None
    return ", ".join(sorted(str(name) for name in expected))


def parse_program(source: SourceFile) -> Program:
    """
    Parses one structured-text file into a checked `Program`.

    Raises:
        ParseError: On malformed syntax, duplicate declarations, undeclared
            identifiers or type mismatches. Carries line and column.
    """
    try:
        tree = _lark.parse(source.body)
    except UnexpectedInput as e:
        token = getattr(e, "token", None)
        if token is not None and token.type == "$END":
            message = "unexpected end of input"
        elif token is not None:
            message = f"unexpected token {token!s}"
        else:
            message = "unexpected input"
        line = e.line if isinstance(e.line, int) and e.line > 0 else 1
        column = e.column if isinstance(e.column, int) and e.column > 0 else 1
        raise ParseError(
            f"{source.path}: {message}",
            line,
            column,
            expected=_describe_expected(e),
        ) from None
    try:
        program: Program = _builder.transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, ParseError):
            raise e.orig_exc from None
        raise
    resolved = _Resolver(program).resolve()
    log.debug(
        "Parsed program",
        extra={
            "path": source.path,
            "program": resolved.name,
            "decls": len(resolved.decls),
            "stmts": len(resolved.stmts),
        },
    )
    return resolved


def load_program(path: str | Path, role: Role) -> Program:
    """Reads a UTF-8 `.st` file from disk and parses it."""
    path = Path(path)
    try:
        body = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"{path}: not valid UTF-8 ({e.reason})", 1, 1) from None
    return parse_program(SourceFile(path=str(path), body=body, role=role))


def parse_text(body: str, role: Role = Role.SAFETY, path: str = "<string>") -> Program:
    """Parses structured text held in memory."""
    return parse_program(SourceFile(path=path, body=body, role=role))
