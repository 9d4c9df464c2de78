"""
This module stores the domain exceptions raised across the toolkit
"""


class InvflipError(Exception):
    """Base class of every domain error."""


class ParseError(InvflipError):
    def __init__(
        self, message: str, line: int, column: int, expected: str | None = None
    ) -> None:
        self.line = line
        self.column = column
        self.expected = expected
        detail = f"line {line}, column {column}: {message}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class NoInvariantFound(InvflipError):
    pass


class UnsupportedAtom(InvflipError):
    pass


class MissingParam(InvflipError):
    def __init__(self, instance: str, param: str) -> None:
        self.instance = instance
        self.param = param
        super().__init__(f"PID call {instance} is missing parameter {param}")


class DuplicatePv(InvflipError):
    def __init__(self, pv: str, first: str, second: str) -> None:
        self.pv = pv
        super().__init__(f"controllers {first} and {second} both claim PV {pv}")


class InvalidParam(InvflipError):
    pass


class ImplicationOnly(InvflipError):
    pass


class EmptyPlan(InvflipError):
    """Every atom is unreachable; `plan` holds the all-unreachable plan."""

    def __init__(self, message: str, plan: object | None = None) -> None:
        self.plan = plan
        super().__init__(message)


class UnknownTag(InvflipError):
    def __init__(self, tag: str, where: str) -> None:
        self.tag = tag
        super().__init__(f"{where} references {tag}, which the plant does not provide")


class ScenarioError(InvflipError):
    pass


class LengthMismatch(InvflipError):
    pass


class StageError(InvflipError):
    """Wraps an error raised inside one pipeline stage."""

    def __init__(self, stage: str, cause: Exception) -> None:
        self.stage = stage
        self.cause = cause
        super().__init__(f"[{stage}] {cause}")
