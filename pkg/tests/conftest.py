"""Shared fixtures: the three-slot, five-customer worked example."""

from pathlib import Path

import numpy as np
import pytest

from netbalance.models.decomposition import Decomposition
from netbalance.models.instance import BlockInstance
from netbalance.models.scenario import (
    ApplicationParams,
    ApplicationUsage,
    CellParams,
    ContractParams,
    Customer,
    Scenario,
)

FIXTURES = Path(__file__).parent / "fixtures"

EXAMPLE_SCORES = [
    [0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0],
    [-1.0, 1.0, 0.0],
    [0.5, 0.5, 0.0],
    [0.5, 2.0, 0.0],
]
EXAMPLE_DEMANDS = [1, 2, 1, 2, 1]

# optimal decomposition of (3, 3, 1)
ZERO_PRICE_PROFILES = [
    [1, 0, 0],
    [1, 0, 1],
    [0, 1, 0],
    [1, 1, 0],
    [0, 1, 0],
]

# optimal decomposition of (3, 2, 2)
OPTIMUM_PROFILES = [
    [1, 0, 0],
    [1, 0, 1],
    [0, 1, 0],
    [1, 0, 1],
    [0, 1, 0],
]


@pytest.fixture
def example_instance() -> BlockInstance:
    return BlockInstance.from_scores(EXAMPLE_SCORES, EXAMPLE_DEMANDS)


@pytest.fixture
def zero_price_decomposition(example_instance) -> Decomposition:
    return Decomposition(example_instance, np.array(ZERO_PRICE_PROFILES))


@pytest.fixture
def optimum_decomposition(example_instance) -> Decomposition:
    return Decomposition(example_instance, np.array(OPTIMUM_PROFILES))


@pytest.fixture
def example_scenario() -> Scenario:
    customers = tuple(
        Customer(contract=0, trajectory=(0, 0, 0),
                 usage=(ApplicationUsage(demand=R, preferences=tuple(rho)),))
        for rho, R in zip(EXAMPLE_SCORES, EXAMPLE_DEMANDS)
    )
    return Scenario(
        T=3,
        L=1,
        applications=(ApplicationParams("download"),),
        contracts=(ContractParams("standard", gamma=1.0, lam=1.0),),
        cells=(CellParams(n1=5, nc=10),),
        customers=customers,
    )


@pytest.fixture
def example_path() -> Path:
    return FIXTURES / "example1.yaml"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def _uniform_scenario(T: int, L: int, cells, trajectory, preferences, count: int) -> Scenario:
    customers = tuple(
        Customer(contract=0, trajectory=trajectory,
                 usage=(ApplicationUsage(demand=1, preferences=preferences),))
        for _ in range(count)
    )
    return Scenario(
        T=T,
        L=L,
        applications=(ApplicationParams("download"),),
        contracts=(ContractParams("standard", gamma=1.0, lam=1.0),),
        cells=cells,
        customers=customers,
    )


@pytest.fixture
def corridor_scenario() -> Scenario:
    """Ten commuters preferring the roomy morning cell; the evening cell holds one"""
    return _uniform_scenario(T=2, L=2, cells=(CellParams(n1=10, nc=20), CellParams(n1=0, nc=1)),
                             trajectory=(0, 1), preferences=(1.0, 0.0), count=10)


@pytest.fixture
def overloaded_scenario() -> Scenario:
    """Three requests into a cell that carries one per time"""
    return _uniform_scenario(T=2, L=1, cells=(CellParams(n1=0, nc=1),),
                             trajectory=(0, 0), preferences=(0.0, 0.0), count=3)
