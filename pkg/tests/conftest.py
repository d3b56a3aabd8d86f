# -*- coding: utf-8 -*-

"""Shared fixtures: Jacobi parameters and grids (session scope, the kernel matrices are
cached per grid)
"""

import numpy as np
import pytest

from jisp.specfun import JacobiParams
from jisp.solvers import ProblemParams, build_grids

COARSE = {'x_max': 10.0, 'n_x': 256, 'lambda_max': 30.0, 'n_lambda': 256}

@pytest.fixture(scope='session')
def cosine():
    return JacobiParams(-0.5, -0.5)

@pytest.fixture(scope='session')
def jacobi00():
    return JacobiParams(0.0, 0.0)

@pytest.fixture(scope='session')
def heat():
    return ProblemParams(gamma=1.0, a=0.0, m=0.0, T=1.0)

@pytest.fixture(scope='session')
def cosine_grids(cosine, heat):
    """Default-size grids of the stability test
    """
    return build_grids(cosine, heat)

@pytest.fixture(scope='session')
def coarse_cosine_grids(cosine, heat):
    return build_grids(cosine, heat, n_t=21, **COARSE)

@pytest.fixture(scope='session')
def coarse_jacobi00_grids(jacobi00, heat):
    return build_grids(jacobi00, heat, n_t=21, **COARSE)

@pytest.fixture
def gaussian():
    """exp(-k x^2), vectorized
    """
    def _gaussian(k=1.0):
        return lambda x: np.exp(-k * x * x)
    return _gaussian
