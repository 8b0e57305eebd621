import math

import pytest

from shlab.exponents import ProblemParams, compute_exponents
from shlab.radial_pde import LogGrid


@pytest.fixture(scope="session")
def exps117():
    return compute_exponents(ProblemParams(11, 7.0))


@pytest.fixture(scope="session")
def params117():
    return ProblemParams(11, 7.0)


@pytest.fixture(scope="session")
def small_grid():
    """64-node grid on a mild domain for oracle-level comparisons."""
    return LogGrid(math.log(1e-2), math.log(1e2), 64)


@pytest.fixture(scope="session")
def medium_grid():
    return LogGrid(math.log(1e-4), math.log(1e3), 512)
