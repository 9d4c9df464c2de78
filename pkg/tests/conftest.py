from pathlib import Path

import pytest

from invflip.st.models import Program, Role
from invflip.st.parser import load_program

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def pump_safety() -> Program:
    return load_program(FIXTURES / "pump_safety.st", Role.SAFETY)


@pytest.fixture
def level_control() -> Program:
    return load_program(FIXTURES / "level_control.st", Role.CONTROL)


@pytest.fixture
def two_invariants() -> Program:
    return load_program(FIXTURES / "two_invariants.st", Role.SAFETY)


@pytest.fixture
def one_armed() -> Program:
    return load_program(FIXTURES / "one_armed.st", Role.SAFETY)
