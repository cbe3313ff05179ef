import numpy as np
import pytest

from dilaflow import fixtures


@pytest.fixture
def ex1():
    return fixtures.example1()


@pytest.fixture
def ex2():
    return fixtures.example2()


@pytest.fixture
def nonres25():
    return fixtures.nonres_25()


@pytest.fixture
def chain3d():
    return fixtures.resonant_chain_3d()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
