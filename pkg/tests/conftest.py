"""Shared fixtures: small exact metrics, spaces, and bicombing handles.

Handles are session-scoped so their internal caches carry across tests;
they hold no mutable semantic state.
"""
from fractions import Fraction

import pytest

from bicomb import (
    ex_bicombing,
    halfplane_space,
    linear_bicombing,
    linf_space,
    make_tightspan,
    random_rational_metric,
    rng_from_seed,
    sigma_H,
    validate_metric,
)


@pytest.fixture
def rng():
    return rng_from_seed(0)


@pytest.fixture(scope="session")
def tri3():
    # 3-point metric with Gromov products (1, 2, 3): tripod arm lengths
    return validate_metric(["a", "b", "c"], [[0, 3, 4], [3, 0, 5], [4, 5, 0]])


@pytest.fixture(scope="session")
def path3():
    # x -- m -- y with unit edges; the only Doss point of uniform{x,y} is m
    return validate_metric(["x", "m", "y"], [[0, 1, 2], [1, 0, 1], [2, 1, 0]])


@pytest.fixture(scope="session")
def two_point():
    return validate_metric(["p", "q"], [[0, 4], [4, 0]])


@pytest.fixture(scope="session")
def metric4():
    return random_rational_metric(rng_from_seed(7), 4)


@pytest.fixture(scope="session")
def linf2():
    return linf_space(2)


@pytest.fixture(scope="session")
def hp():
    return halfplane_space()


@pytest.fixture(scope="session")
def ts3(tri3):
    return make_tightspan(tri3)


@pytest.fixture(scope="session")
def ts4(metric4):
    return make_tightspan(metric4)


@pytest.fixture(scope="session")
def lin2(linf2):
    return linear_bicombing(linf2)


@pytest.fixture(scope="session")
def lin_hp(hp):
    return linear_bicombing(hp)


@pytest.fixture(scope="session")
def sigma_h():
    return sigma_H(120)


@pytest.fixture(scope="session")
def ex3(ts3):
    return ex_bicombing(ts3)


@pytest.fixture(scope="session")
def ex4(ts4):
    return ex_bicombing(ts4)


HALF = Fraction(1, 2)
