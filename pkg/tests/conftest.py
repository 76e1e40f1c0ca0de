"""Shared fixtures for the drrmdpf tests"""
import numpy as np
import pytest

from drrmdpf.consts import (
    ARRIVAL_CONSTANT,
    PATTERN_SEQUENTIAL,
    REWARD_QUALITATIVE,
    SELECT_SAMPLE,
)
from drrmdpf.scenario import Scenario


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def line_scenario():
    return Scenario(
        topology="line",
        name="line",
        seed=1,
        interest_rate=1.0,
        duration=10.0,
        arrival_process=ARRIVAL_CONSTANT,
        request_pattern=PATTERN_SEQUENTIAL,
    )


@pytest.fixture
def grid_scenario():
    return Scenario(
        topology="grid",
        name="grid",
        seed=42,
        interest_rate=200.0,
        duration=1.0,
        catalog_size=500,
        reward_mode=REWARD_QUALITATIVE,
        selection_mode=SELECT_SAMPLE,
    )
