from __future__ import annotations

import numpy as np
import pytest

from vfo_adr_sim.scenarios import parse_config
from vfo_adr_sim.simulation.schemas import ScenarioConfig


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: full-horizon scenario reproductions (minutes)")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def scenario_a() -> ScenarioConfig:
    return parse_config("scenario_a")


@pytest.fixture(scope="session")
def scenario_b() -> ScenarioConfig:
    return parse_config("scenario_b")

