"""Doss expectations: exhaustive finite sets and witness search."""
from fractions import Fraction

import pytest

from bicomb.doss import (
    banach_witness_search,
    doss_membership,
    doss_set_finite,
    doss_violation,
    w1_to_dirac,
)
from bicomb.halfplane import beta_vertex
from bicomb.sampling import random_rational_metric, rng_from_seed, sample_point
from bicomb.spaces import finite_space
from bicomb.wasserstein import dirac, measure


def test_w1_to_dirac_forced_coupling(tri3):
    sp = finite_space(tri3)
    mu = measure(sp, [(0, Fraction(1, 2)), (1, Fraction(1, 2))])
    assert w1_to_dirac(mu, 2) == Fraction(1, 2) * (tri3.d[0][2] + tri3.d[1][2])


def test_doss_of_dirac_is_the_point(rng):
    for _ in range(5):
        fm = random_rational_metric(rng, 5)
        sp = finite_space(fm)
        x = int(rng.integers(5))
        assert doss_set_finite(dirac(sp, x)) == [x]


def test_doss_two_point_uniform_is_empty(two_point):
    sp = finite_space(two_point)
    mu = measure(sp, [(0, Fraction(1, 2)), (1, Fraction(1, 2))])
    assert doss_set_finite(mu) == []


def test_doss_path_midpoint(path3):
    # x -- m -- y: the middle vertex is the unique Doss point of uniform{x,y}
    sp = finite_space(path3)
    mu = measure(sp, [(0, Fraction(1, 2)), (2, Fraction(1, 2))])
    assert doss_set_finite(mu) == [1]


def test_linf_midpoint_is_doss_and_perturbations_are_not(linf2):
    rng = rng_from_seed(19)
    for _ in range(10):
        x = tuple(float(v) for v in rng.uniform(-2, 2, size=2))
        y = tuple(float(v) for v in rng.uniform(-2, 2, size=2))
        mu = measure(linf2, [(x, Fraction(1, 2)), (y, Fraction(1, 2))])
        mid = tuple((a + b) / 2 for a, b in zip(x, y))
        hit = banach_witness_search(mu, mid, seed=1, budget=150)
        assert hit.witness is None
        off = (mid[0] + 0.4, mid[1])
        miss = banach_witness_search(mu, off, seed=1, budget=150)
        assert miss.witness is not None
        assert doss_violation(mu, off, miss.witness) > 1e-9


def test_membership_check_reports_worst_witness(linf2):
    mu = measure(linf2, [((0.0, 0.0), Fraction(1, 2)), ((2.0, 0.0), Fraction(1, 2))])
    ok, _, worst = doss_membership(mu, (1.0, 0.0), [(0.0, 0.0), (5.0, 0.0), (-5.0, 0.0)])
    assert ok and worst <= 1e-12
    bad, w, v = doss_membership(mu, (1.8, 0.0), [(0.0, 0.0), (5.0, 0.0), (-5.0, 0.0)])
    assert not bad and v > 0
    # (0,0) and (-5,0) are tied maximizers with violation 0.8; the reported
    # witness must reproduce the reported violation.
    assert v == pytest.approx(0.8, abs=1e-12)
    assert doss_violation(mu, (1.8, 0.0), w) == pytest.approx(v, abs=1e-12)


def test_halfplane_barycenter_is_doss_member(hp):
    mu = measure(hp, [((-1.0, 0.0), Fraction(1, 2)), ((1.0, 0.0), Fraction(1, 2))])
    z = tuple(float(c) for c in beta_vertex(mu))
    assert z == (0.0, 1.0)
    hit = banach_witness_search(mu, z, seed=3, budget=300)
    assert hit.witness is None
    assert hit.checked == 300
    # the linear midpoint (0,0) is also a member here (unlike in the plane)
    hit0 = banach_witness_search(mu, (0.0, 0.0), seed=3, budget=300)
    assert hit0.witness is None


def test_finite_search_is_exhaustive(path3):
    sp = finite_space(path3)
    mu = measure(sp, [(0, Fraction(1, 2)), (2, Fraction(1, 2))])
    hit = banach_witness_search(mu, 0, budget=10)
    assert hit.witness is not None  # an endpoint is excluded by some vertex
    ok = banach_witness_search(mu, 1, budget=10)
    assert ok.witness is None
