"""Wasserstein-1 distances between finitely supported probability measures.

Three routes, kept deliberately independent so they can certify each other:
the closed interval formula for two-point measures, an assignment solve for
uniform measures, and a transportation LP for the general case. On finite
ground metrics with rational weights everything is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .assignment import min_cost_assignment
from .linprog import LPError, solve_lp
from .rationals import parse_rational
from .spaces import Space, SpaceMismatchError, dist, point_key


class MeasureError(ValueError):
    pass


@dataclass(frozen=True)
class Measure:
    space: Space
    support: tuple
    weights: tuple  # Fractions, strictly positive, summing to 1

    @property
    def size(self) -> int:
        return len(self.support)

    def key(self) -> tuple:
        return tuple(sorted(((point_key(p), w) for p, w in
                             zip(self.support, self.weights))))

    def to_dict(self) -> dict:
        from .handles import jsonable

        return {"support": jsonable(list(self.support)),
                "weights": jsonable(list(self.weights))}


def measure(space: Space, atoms: Sequence) -> Measure:
    """Build a measure from (point, weight) pairs.

    Exact duplicates are merged, zero weights dropped; weights must be
    rationals summing to 1 exactly.
    """
    merged = {}
    points = {}
    for p, w in atoms:
        w = parse_rational(w)
        if w < 0:
            raise MeasureError(f"negative weight {w}")
        k = point_key(p)
        merged[k] = merged.get(k, Fraction(0)) + w
        points.setdefault(k, p)
    support, weights = [], []
    for k, w in merged.items():
        if w != 0:
            support.append(points[k])
            weights.append(w)
    total = sum(weights, Fraction(0))
    if total != 1:
        raise MeasureError(f"weights sum to {total}, not 1")
    if not support:
        raise MeasureError("empty measure")
    return Measure(space, tuple(support), tuple(weights))


def dirac(space: Space, p) -> Measure:
    return Measure(space, (p,), (Fraction(1),))


def pushforward(mu: Measure, point_map: Callable, target: Space) -> Measure:
    return measure(target, [(point_map(p), w) for p, w in
                            zip(mu.support, mu.weights)])


def w1_two_point(space: Space, x1, x2, s, y1, y2, t):
    """W1 between (1-s)dx1 + s dx2 and (1-t)dy1 + t dy2.

    The coupling has one free parameter: the mass lam sent x2 -> y2 ranges
    over [max(s+t-1, 0), min(s,t)], and the cost is affine in lam, so the
    optimum sits at an endpoint. Returns (value, lam).
    """
    if not (0 <= s <= 1 and 0 <= t <= 1):
        raise MeasureError("mixture parameters must lie in [0, 1]")
    d11 = dist(space, x1, y1)
    d12 = dist(space, x1, y2)
    d21 = dist(space, x2, y1)
    d22 = dist(space, x2, y2)
    lo = max(s + t - 1, 0 * s)
    hi = min(s, t)

    def cost(lam):
        return ((1 - s - t + lam) * d11 + (t - lam) * d12
                + (s - lam) * d21 + lam * d22)

    clo, chi = cost(lo), cost(hi)
    if clo <= chi:
        return clo, lo
    return chi, hi


def w1_uniform(space: Space, xs: Sequence, ys: Sequence):
    """W1 between uniform measures on two equal-size tuples: an assignment
    problem (Birkhoff: extreme couplings are permutations). Returns
    (value, perm)."""
    n = len(xs)
    if n != len(ys) or n == 0:
        raise MeasureError("need two equal-size nonempty tuples")
    cost = [[dist(space, x, y) for y in ys] for x in xs]
    total, perm = min_cost_assignment(cost)
    if isinstance(total, Fraction):
        return total / n, perm
    return total / n, perm


@dataclass
class TransportResult:
    value: object
    plan: tuple  # row-major matrix, plan[i][j] mass from mu atom i to nu atom j
    exact: bool

    def plan_cost(self, costs) -> object:
        return sum(
            (self.plan[i][j] * costs[i][j]
             for i in range(len(self.plan)) for j in range(len(self.plan[0]))),
            costs[0][0] * 0,
        )


def w1_general(mu: Measure, nu: Measure) -> TransportResult:
    """Transportation LP between two finitely supported measures.

    Exact rational optimum on finite ground spaces; float simplex otherwise.
    """
    if mu.space != nu.space:
        raise SpaceMismatchError("measures live on different spaces")
    space = mu.space
    exact = space.kind == "finite"
    m, n = mu.size, nu.size
    costs = [[dist(space, p, q) for q in nu.support] for p in mu.support]
    c = [costs[i][j] for i in range(m) for j in range(n)]
    A_eq, b_eq = [], []
    for i in range(m):
        row = [0] * (m * n)
        for j in range(n):
            row[i * n + j] = 1
        A_eq.append(row)
        b_eq.append(mu.weights[i])
    for j in range(n - 1):  # last column constraint is redundant
        row = [0] * (m * n)
        for i in range(m):
            row[i * n + j] = 1
        A_eq.append(row)
        b_eq.append(nu.weights[j])
    res = solve_lp(c, A_eq=A_eq, b_eq=b_eq, exact=exact)
    if not res.ok:
        raise LPError(f"transport LP unexpectedly {res.status}")
    plan = tuple(tuple(res.x[i * n + j] for j in range(n)) for i in range(m))
    return TransportResult(res.value, plan, exact)


@dataclass
class DualPotential:
    metric_space: Space
    f: tuple  # one value per ground point
    value: object

    def feasibility_defect(self):
        d = self.metric_space.metric.d
        n = len(self.f)
        worst = 0
        for i in range(n):
            for j in range(n):
                if i != j:
                    v = self.f[i] - self.f[j] - d[i][j]
                    if v > worst:
                        worst = v
        return worst


def kantorovich_dual(mu: Measure, nu: Measure) -> DualPotential:
    """max sum f d(mu - nu) over 1-Lipschitz f on the finite ground space;
    solved exactly, so the potential is exactly feasible."""
    if mu.space != nu.space:
        raise SpaceMismatchError("measures live on different spaces")
    space = mu.space
    if space.kind != "finite":
        raise SpaceMismatchError("dual potentials need a finite ground space")
    fm = space.metric
    n = fm.size
    diff = [Fraction(0)] * n
    for p, w in zip(mu.support, mu.weights):
        diff[p] += w
    for q, w in zip(nu.support, nu.weights):
        diff[q] -= w
    # f = u - v with u, v >= 0; maximize diff . f  ==  minimize -diff . f
    c = [-v for v in diff] + [v for v in diff]
    A_ub, b_ub = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                row = [0] * (2 * n)
                row[i] = 1
                row[j] = -1
                row[n + i] = -1
                row[n + j] = 1
                A_ub.append(row)
                b_ub.append(fm.d[i][j])
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, exact=True)
    if not res.ok:
        raise LPError(f"dual LP unexpectedly {res.status}")
    f = tuple(res.x[i] - res.x[n + i] for i in range(n))
    value = sum((fi * di for fi, di in zip(f, diff)), Fraction(0))
    return DualPotential(space, f, value)
