"""Injective hull: extremal functions, retraction, hull bicombing."""
from fractions import Fraction

import pytest

from bicomb.extension import ball_intersection_point
from bicomb.moduli import SweepConfig, conical_defect, geodesic_defect, reversibility_defect
from bicomb.sampling import rng_from_seed
from bicomb.spaces import dist
from bicomb.tightspan import (
    TightSpanError,
    delta_defect,
    embed,
    embedding_isometry_defect,
    is_extremal,
    lipschitz_extend_real,
    retract,
    retract_with_stats,
    sample_extremal,
    star_residual,
)

HALF = Fraction(1, 2)


def test_embedded_points_are_extremal(ts3, tri3):
    for i in range(3):
        e = embed(ts3, i)
        assert tuple(e.values) == tuple(tri3.d[i])
        assert is_extremal(ts3, e.values, eps=1e-12)
        assert delta_defect(ts3, e.values) == 0


def test_embedding_is_isometric(ts3, ts4):
    assert embedding_isometry_defect(ts3) <= 1e-12
    assert embedding_isometry_defect(ts4) <= 1e-12


def test_steiner_point_of_three_point_metric(ts3):
    # Gromov products of d = [[0,3,4],[3,0,5],[4,5,0]] are (1, 2, 3): the
    # tripod center; it is extremal and its distance to e(i) is the arm.
    center = (1.0, 2.0, 3.0)
    assert is_extremal(ts3, center, eps=1e-12)
    assert retract(ts3, center).values == pytest.approx(center, abs=1e-12)
    for i, arm in enumerate((1.0, 2.0, 3.0)):
        assert float(dist(ts3, embed(ts3, i), retract(ts3, center))) == pytest.approx(arm, abs=1e-12)


def test_two_point_hull_is_segment(two_point):
    from bicomb.tightspan import make_tightspan

    ts = make_tightspan(two_point)
    d = float(two_point.d[0][1])
    rng = rng_from_seed(1)
    for _ in range(30):
        raw = tuple(float(v) for v in rng.uniform(0, 2 * d, size=2))
        f = retract(ts, raw)
        # E(two points) = {(a, d-a) : 0 <= a <= d}, up to retraction eps
        assert f.values[0] + f.values[1] == pytest.approx(d, abs=1e-9)
        assert -1e-8 <= f.values[0] <= d + 1e-8


def test_retract_fixes_extremal_points(ts4, rng):
    for _ in range(40):
        f = sample_extremal(ts4, rng)
        g = retract(ts4, f.values)
        assert max(abs(a - b) for a, b in zip(f.values, g.values)) <= 1e-12


def test_retract_outputs_extremal(ts4, rng):
    diam = float(ts4.metric.diameter)
    for _ in range(60):
        raw = tuple(float(v) for v in rng.uniform(0, diam, size=4))
        f = retract(ts4, raw)
        assert star_residual(ts4, f.values) <= 1e-8


def test_retract_is_1_lipschitz_on_ambient_pairs(ts4, rng):
    diam = float(ts4.metric.diameter)
    for _ in range(300):
        u = tuple(float(v) for v in rng.uniform(0, diam, size=4))
        v = tuple(float(v) for v in rng.uniform(0, diam, size=4))
        ru, rv = retract(ts4, u), retract(ts4, v)
        du = max(abs(a - b) for a, b in zip(u, v))
        assert float(dist(ts4, ru, rv)) <= du + 1e-9


def test_retract_reports_stats(ts4):
    f, stats = retract_with_stats(ts4, (10.0, 10.0, 10.0, 10.0))
    assert stats.iterations >= 1
    assert star_residual(ts4, f.values) <= 1e-8


def test_hull_bicombing_endpoints_and_midpoint(ex3, ts3):
    e0, e1 = embed(ts3, 0), embed(ts3, 1)
    assert ex3(e0, e1, Fraction(0)).values == pytest.approx(tuple(map(float, e0.values)), abs=1e-12)
    assert ex3(e0, e1, Fraction(1)).values == pytest.approx(tuple(map(float, e1.values)), abs=1e-12)
    mid = ex3(e0, e1, HALF)
    d = float(dist(ts3, e0, e1))
    assert float(dist(ts3, e0, mid)) == pytest.approx(d / 2, abs=1e-9)
    assert float(dist(ts3, mid, e1)) == pytest.approx(d / 2, abs=1e-9)


def test_hull_bicombing_defects(ex4):
    cfg = SweepConfig(samples=120, seed=2, tolerance=1e-8)
    assert conical_defect(ex4, cfg).passed
    assert geodesic_defect(ex4, cfg).passed
    assert reversibility_defect(ex4, cfg).passed


def test_lipschitz_extension_agrees_on_base(ts3, tri3):
    fvals = [0.0, float(tri3.d[0][1]), float(tri3.d[0][2])]  # f = d(a, .)
    for i in range(3):
        assert lipschitz_extend_real(ts3, fvals, embed(ts3, i)) == pytest.approx(fvals[i], abs=1e-12)


def test_lipschitz_extension_is_1_lipschitz(ts4, rng):
    fd = ts4.metric.fd
    fvals = [min(fd[i][0], fd[i][1]) for i in range(4)]  # inf of 1-Lipschitz maps
    pts = [sample_extremal(ts4, rng) for _ in range(25)]
    vals = [lipschitz_extend_real(ts4, fvals, p) for p in pts]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            assert abs(vals[i] - vals[j]) <= float(dist(ts4, pts[i], pts[j])) + 1e-9


def test_lipschitz_extension_rejects_bad_input(ts3, tri3):
    with pytest.raises(TightSpanError):
        lipschitz_extend_real(ts3, [0.0, 100.0, 0.0], embed(ts3, 0))


def test_hyperconvexity_spot_check(ts4, rng):
    # pairwise-intersecting sup-balls around hull points share a point
    for _ in range(10):
        a, b = sample_extremal(ts4, rng), sample_extremal(ts4, rng)
        r = float(dist(ts4, a, b)) / 2
        w, viol, _ = ball_intersection_point(ts4, [a, b], [r, r])
        assert viol <= 1e-7
        assert float(dist(ts4, a, w)) <= r + 1e-7
        assert float(dist(ts4, b, w)) <= r + 1e-7
