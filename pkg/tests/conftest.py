import numpy as np
import pytest

from wexpfit._backend import available_backends
from wexpfit.censoring import HybridScheme, apply_scheme, generate_censored
from wexpfit.datasets import BJERKEDAL
from wexpfit.distribution import WEParams


@pytest.fixture(scope="session")
def scheme1():
    return apply_scheme(BJERKEDAL, HybridScheme(72, 60, 300.0), allow_ties=True)


@pytest.fixture(scope="session")
def scheme2():
    return apply_scheme(BJERKEDAL, HybridScheme(72, 65, 250.0), allow_ties=True)


@pytest.fixture(scope="session")
def full_data():
    # clock limit beyond the largest observation: complete sample, case III
    return apply_scheme(BJERKEDAL, HybridScheme(72, 60, 1e9), allow_ties=True)


@pytest.fixture(scope="session")
def sim_data():
    """One mildly censored simulated dataset, n = 40."""
    rng = np.random.default_rng(2024)
    return generate_censored(WEParams(2.5, 3.0), HybridScheme(40, 30, 2.0), rng)


def pytest_generate_tests(metafunc):
    if "backend" in metafunc.fixturenames:
        metafunc.parametrize("backend", sorted(available_backends()))
