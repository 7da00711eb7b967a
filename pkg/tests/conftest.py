from functools import lru_cache

import numpy as np
import pytest

from khessian import h1_eval, load_datum, make_grid

CASES = [(2, "dirichlet"), (2, "navier"), (3, "dirichlet"), (3, "navier")]


@lru_cache(maxsize=None)
def forcing(g: str = "one", N: int = 2, t_max: float = 40.0, n: int = 4001):
    return h1_eval(load_datum(g), N, make_grid(t_max, n))


@pytest.fixture(scope="session")
def grid():
    return make_grid()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
