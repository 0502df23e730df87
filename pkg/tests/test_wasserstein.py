"""W1 routes checked against each other and against closed forms."""
import itertools
from fractions import Fraction

import pytest

from bicomb.sampling import (
    random_rational_metric,
    random_weights,
    rng_from_seed,
    sample_grid_t,
)
from bicomb.spaces import SpaceMismatchError, dist, finite_space, linf_space
from bicomb.tightspan import embed
from bicomb.wasserstein import (
    MeasureError,
    dirac,
    kantorovich_dual,
    measure,
    pushforward,
    w1_general,
    w1_two_point,
    w1_uniform,
)


def test_measure_merges_duplicates_and_drops_zeros(linf2):
    mu = measure(linf2, [((0.0, 0.0), "1/4"), ((0.0, 0.0), "1/4"),
                         ((1.0, 1.0), "1/2"), ((2.0, 2.0), 0)])
    assert mu.size == 2
    assert sorted(mu.weights) == [Fraction(1, 2), Fraction(1, 2)]


def test_measure_rejects_bad_weights(linf2):
    with pytest.raises(MeasureError):
        measure(linf2, [((0.0, 0.0), "1/2")])
    with pytest.raises(MeasureError):
        measure(linf2, [((0.0, 0.0), "3/2"), ((1.0, 1.0), "-1/2")])
    with pytest.raises(MeasureError):
        measure(linf2, [])


def test_two_point_shared_support_closed_form(two_point):
    # both measures on the same two atoms at distance d: W1 = |s-t| d
    sp = finite_space(two_point)
    d = two_point.d[0][1]
    for s, t in [(Fraction(1, 3), Fraction(3, 4)), (Fraction(0), Fraction(1)),
                 (Fraction(1, 2), Fraction(1, 2))]:
        val, lam = w1_two_point(sp, 0, 1, s, 0, 1, t)
        assert val == abs(s - t) * d
        assert isinstance(val, Fraction)


def test_two_point_equals_lp_exact_on_finite(rng):
    for _ in range(60):
        fm = random_rational_metric(rng, 5)
        sp = finite_space(fm)
        x1, x2, y1, y2 = (int(v) for v in rng.integers(0, 5, size=4))
        if x1 == x2 or y1 == y2:
            continue
        s, t = sample_grid_t(rng, 24), sample_grid_t(rng, 24)
        val, lam = w1_two_point(sp, x1, x2, s, y1, y2, t)
        mu = measure(sp, [(x1, 1 - s), (x2, s)])
        nu = measure(sp, [(y1, 1 - t), (y2, t)])
        res = w1_general(mu, nu)
        assert res.exact
        assert val == res.value


def test_two_point_equals_lp_float_on_linf(linf2, rng):
    for _ in range(50):
        pts = [tuple(float(v) for v in rng.uniform(-2, 2, size=2)) for _ in range(4)]
        s, t = sample_grid_t(rng, 24), sample_grid_t(rng, 24)
        val, _ = w1_two_point(linf2, pts[0], pts[1], s, pts[2], pts[3], t)
        mu = measure(linf2, [(pts[0], 1 - s), (pts[1], s)])
        nu = measure(linf2, [(pts[2], 1 - t), (pts[3], t)])
        assert float(val) == pytest.approx(float(w1_general(mu, nu).value), abs=1e-9)


def test_two_point_coupling_parameter_is_feasible(two_point, rng):
    sp = finite_space(two_point)
    for _ in range(20):
        s, t = sample_grid_t(rng, 12), sample_grid_t(rng, 12)
        _, lam = w1_two_point(sp, 0, 1, s, 0, 1, t)
        assert max(Fraction(0), s + t - 1) <= lam <= min(s, t)


def test_uniform_equals_brute_force(rng):
    for n in range(1, 6):
        fm = random_rational_metric(rng, 6)
        sp = finite_space(fm)
        xs = [int(v) for v in rng.integers(0, 6, size=n)]
        ys = [int(v) for v in rng.integers(0, 6, size=n)]
        val, perm = w1_uniform(sp, xs, ys)
        ref = min(
            sum((fm.d[xs[i]][ys[p[i]]] for i in range(n)), Fraction(0))
            for p in itertools.permutations(range(n))
        ) / n
        assert val == ref
        assert sorted(perm) == list(range(n))


def test_uniform_rejects_mismatched_sizes(two_point):
    sp = finite_space(two_point)
    with pytest.raises(MeasureError):
        w1_uniform(sp, [0], [0, 1])
    with pytest.raises(MeasureError):
        w1_uniform(sp, [], [])


def test_general_plan_has_marginals(rng):
    fm = random_rational_metric(rng, 4)
    sp = finite_space(fm)
    wa, wb = random_weights(rng, 3), random_weights(rng, 4)
    mu = measure(sp, list(zip([0, 1, 2], wa)))
    nu = measure(sp, list(zip([0, 1, 2, 3], wb)))
    res = w1_general(mu, nu)
    for i, w in enumerate(mu.weights):
        assert sum(res.plan[i], Fraction(0)) == w
    for j, w in enumerate(nu.weights):
        assert sum((res.plan[i][j] for i in range(mu.size)), Fraction(0)) == w
    costs = [[dist(sp, p, q) for q in nu.support] for p in mu.support]
    assert res.plan_cost(costs) == res.value


def test_dual_equals_primal_exact(rng):
    for _ in range(15):
        n = int(rng.integers(2, 6))
        fm = random_rational_metric(rng, n)
        sp = finite_space(fm)
        ka, kb = int(rng.integers(1, n + 1)), int(rng.integers(1, n + 1))
        mu = measure(sp, list(zip(range(ka), random_weights(rng, ka))))
        nu = measure(sp, list(zip(range(kb), random_weights(rng, kb))))
        primal = w1_general(mu, nu)
        dual = kantorovich_dual(mu, nu)
        assert primal.value == dual.value
        assert dual.feasibility_defect() <= 0


def test_dual_requires_finite_space(linf2):
    mu = dirac(linf2, (0.0, 0.0))
    nu = dirac(linf2, (1.0, 0.0))
    with pytest.raises(SpaceMismatchError):
        kantorovich_dual(mu, nu)


def test_spaces_must_match(two_point, linf2):
    sp = finite_space(two_point)
    with pytest.raises(SpaceMismatchError):
        w1_general(dirac(sp, 0), dirac(linf2, (0.0, 0.0)))


def test_pushforward_embedding_preserves_w1(tri3, ts3, rng):
    sp = finite_space(tri3)
    for _ in range(10):
        ka, kb = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        mu = measure(sp, list(zip(range(ka), random_weights(rng, ka))))
        nu = measure(sp, list(zip(range(kb), random_weights(rng, kb))))
        base = w1_general(mu, nu).value
        emu = pushforward(mu, lambda i: embed(ts3, i), ts3)
        enu = pushforward(nu, lambda i: embed(ts3, i), ts3)
        lifted = w1_general(emu, enu).value
        assert float(lifted) == pytest.approx(float(base), abs=1e-9)


def test_w1_dirac_pair_is_distance(tri3):
    sp = finite_space(tri3)
    res = w1_general(dirac(sp, 0), dirac(sp, 2))
    assert res.value == tri3.d[0][2]
