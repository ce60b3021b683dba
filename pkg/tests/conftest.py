import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from grigwalk import (
    GroupAction,
    WreathProduct,
    cyclic_group,
    first_group,
    kaimanovich_measure,
    rho1,
    rho2,
    rho_pair,
)


@pytest.fixture(scope="session")
def G():
    return first_group()


@pytest.fixture(scope="session")
def kai(G):
    return kaimanovich_measure(G)


@pytest.fixture(scope="session")
def ray_action(G):
    return GroupAction("single", [G], rho1())


@pytest.fixture(scope="session")
def pair_action(G):
    return GroupAction("product", [G, G], rho_pair())


@pytest.fixture(scope="session")
def diag_action(G):
    return GroupAction("diagonal", [G], rho_pair())


@pytest.fixture(scope="session")
def W_c2(diag_action):
    return WreathProduct(cyclic_group(2), diag_action)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
