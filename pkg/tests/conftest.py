"""Shared fixtures and independent oracles."""

import numpy as np
import pytest
from sympy import Rational
from sympy.physics.wigner import clebsch_gordan as sympy_cg
from sympy.physics.wigner import wigner_6j as sympy_6j

from su2lgt.lattice import LatticeSpec


def sym_cg(j1, m1, j2, m2, J, M):
    """Clebsch-Gordan from sympy's exact implementation, arguments doubled."""
    r = [Rational(x, 2) for x in (j1, j2, J, m1, m2, M)]
    return float(sympy_cg(*r))


def sym_6j(*doubled):
    try:
        return float(sympy_6j(*[Rational(x, 2) for x in doubled]))
    except ValueError:
        # sympy rejects triads that violate the triangle rule
        return 0.0


@pytest.fixture
def two_plaquettes():
    return LatticeSpec(2)


@pytest.fixture
def four_plaquettes():
    return LatticeSpec(4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
