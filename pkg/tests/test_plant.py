import pytest

from invflip.sim.models import PlantParams, PlantState
from invflip.sim.plant import plant_step, valve_opening


def test_equilibrium_holds_level() -> None:
    state = PlantState(level=50.0, valve=50.0, pump_on=True)
    for _ in range(100):
        state = plant_step(state, PlantParams(), 0.1)
    assert state.level == pytest.approx(50.0, abs=1e-9)


def test_closed_valve_drains_one_percent_per_second() -> None:
    state = PlantState(level=50.0, valve=0.0, pump_on=True)
    for _ in range(10):
        state = plant_step(state, PlantParams(), 0.1)
    assert state.level == pytest.approx(49.0, abs=1e-9)


def test_pressure_follows_pump_and_blockage() -> None:
    params = PlantParams(blockage=1.0)
    running = plant_step(PlantState(pump_on=True, valve=50.0), params, 0.1)
    assert running.pressure == pytest.approx(6.0)
    stopped = plant_step(PlantState(pump_on=False), params, 0.1)
    assert stopped.pressure == 0.0


def test_pump_off_and_closed_valve_keeps_level() -> None:
    state = PlantState(level=37.5, valve=0.0, pump_on=False)
    for _ in range(50):
        state = plant_step(state, PlantParams(), 0.1)
    assert state.level == 37.5


@pytest.mark.parametrize(
    ("level", "valve", "pump_on", "expected"),
    [(0.05, 0.0, True, 0.0), (99.9, 100.0, False, 100.0)],
)
def test_level_is_clamped(
    level: float, valve: float, pump_on: bool, expected: float
) -> None:
    state = PlantState(level=level, valve=valve, pump_on=pump_on)
    state = plant_step(state, PlantParams(), 1.0)
    assert state.level == expected


def test_fail_open_valve_inverts_signal() -> None:
    params = PlantParams(valve_fail_open=True)
    assert valve_opening(0.0, params) == 100.0
    assert valve_opening(30.0, params) == 70.0
    assert valve_opening(130.0, params) == 0.0
    assert valve_opening(30.0, PlantParams()) == 30.0


@pytest.mark.parametrize(
    "kwargs", [{"q_out": -1.0}, {"k_in": -0.1}, {"blockage": 1.5}, {"blockage": -0.1}]
)
def test_plant_params_are_validated(kwargs: dict[str, float]) -> None:
    with pytest.raises(ValueError):
        PlantParams(**kwargs)
