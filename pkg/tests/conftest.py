import math

import numpy as np
import pytest

from kirchhoff_singular import Params, make_grid


@pytest.fixture(scope="session")
def grid():
    return make_grid(1e-6, 4096)


@pytest.fixture(scope="session")
def coarse():
    return make_grid(1e-6, 1024)


def w0_exact(N, r):
    r = np.asarray(r, dtype=float)
    if N == 2:
        return -np.log(r) / (2 * math.pi)
    P = Params(N, 2.0)
    return P.c_N * (r ** (2.0 - N) - 1.0)
