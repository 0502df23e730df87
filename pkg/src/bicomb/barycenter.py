"""Contracting barycenters from a conical bicombing.

The n-point barycenter b_n is the limit of the derived sequence: replace
each point of a multiset by the barycenter of the others and repeat; the
diameter contracts by 1/(n-1) per round. Rational-weight barycenters come
from replicating the multiset (b_{nk} of k copies converges in k); joining
two Diracs through beta turns all of this back into a bicombing.

For handles that declare linearity the derived map preserves the
coordinatewise mean and contracts the spread around it, so b_n is exactly
the mean and the replication limit is exactly the weighted mean; the
closed form is used there and cross-certified against the generic path in
the tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .handles import Bicombing
from .spaces import Space, dist, point_key
from .wasserstein import Measure


class BarycenterError(Exception):
    pass


class SizeCapError(BarycenterError):
    pass


class RoundBudgetError(BarycenterError):
    def __init__(self, message, diameter):
        super().__init__(message)
        self.diameter = diameter


@dataclass
class BarycenterConfig:
    eps: float = 1e-8
    round_budget: int = 400        # derived rounds per recursion level
    replication_budget: int = 3    # max replication factor k
    # Hard cap on the expanded multiset size n*k. The recursion cost is
    # ~factorial: measured 5 s at 6 points, 71 s at 7, out of memory at 8
    # (flat midpoints; curved ones are ~10x slower per point).
    size_cap: int = 7


class _Ctx:
    __slots__ = ("space", "mid", "eps", "round_budget", "memo", "evals")

    def __init__(self, space, mid, cfg):
        self.space = space
        self.mid = mid
        self.eps = cfg.eps
        self.round_budget = cfg.round_budget
        self.memo = {}
        self.evals = 0


def _sorted_tuple(points) -> tuple:
    return tuple(sorted(points, key=point_key))


def _derived(ms: tuple, ctx: _Ctx):
    m = len(ms)
    if m == 1:
        return ms[0]
    memo = ctx.memo
    got = memo.get(ms)
    if got is not None:
        return got
    if m == 2:
        ctx.evals += 1
        val = ctx.mid(ms[0], ms[1])
        memo[ms] = val
        return val
    space = ctx.space
    cur = ms
    for _ in range(ctx.round_budget):
        distinct = [cur[0]]
        for p in cur[1:]:
            if p is not distinct[-1] and p != distinct[-1]:
                distinct.append(p)
        diam = 0.0
        for i in range(len(distinct)):
            for j in range(i + 1, len(distinct)):
                d = float(dist(space, distinct[i], distinct[j]))
                if d > diam:
                    diam = d
        if diam <= ctx.eps:
            memo[ms] = cur[0]
            return cur[0]
        values = {}
        for p in distinct:
            k = cur.index(p)
            values[point_key(p)] = _derived(cur[:k] + cur[k + 1:], ctx)
        cur = _sorted_tuple(values[point_key(p)] for p in cur)
    raise RoundBudgetError(
        f"derived sequence for {m} points stalled at diameter {diam:.3e}", diam)


def b_n(sigma: Bicombing, points: Sequence, cfg: Optional[BarycenterConfig] = None):
    """Barycenter of a finite multiset via the derived sequence of
    sigma-midpoints. Invariant under permutations by construction (the
    multiset is canonicalized)."""
    cfg = cfg or BarycenterConfig()
    pts = _sorted_tuple(points)
    if not pts:
        raise BarycenterError("empty multiset")
    if len(pts) > cfg.size_cap:
        raise SizeCapError(
            f"multiset size {len(pts)} exceeds cap {cfg.size_cap}; the derived "
            "recursion cost grows factorially")
    half = Fraction(1, 2)
    ctx = _Ctx(sigma.space, lambda a, b: sigma(a, b, half), cfg)
    return _derived(pts, ctx)


def _linear_mean(space: Space, mu: Measure):
    dim = len(tuple(mu.support[0]))
    out = []
    for i in range(dim):
        out.append(float(sum(float(w) * float(p[i])
                             for p, w in zip(mu.support, mu.weights))))
    return tuple(out)


@dataclass
class BarycenterReport:
    value: object
    increments: list
    converged: bool
    closed_form: bool
    denominator: int
    evaluations: int
    midpoint_gap: Optional[float] = None  # |beta - sigma-midpoint| when defined
    meta: dict = field(default_factory=dict)


def beta_rational(mu: Measure, sigma: Bicombing,
                  cfg: Optional[BarycenterConfig] = None,
                  method: str = "auto") -> BarycenterReport:
    """Barycenter of a rational-weight measure.

    Generic route: write the weights over a common denominator n, replicate
    the expanded multiset k times and track the increments d(b_{nk}, b_{n(k-1)});
    the result is never returned without its convergence flag. Linear
    handles take the exact closed form instead (method="iterative" forces
    the generic route).
    """
    cfg = cfg or BarycenterConfig()
    denom = 1
    for w in mu.weights:
        denom = denom * w.denominator // math.gcd(denom, w.denominator)
    expanded = []
    for p, w in zip(mu.support, mu.weights):
        expanded.extend([p] * int(w * denom))

    if method == "auto" and sigma.linear and mu.space.kind in ("linf", "halfplane"):
        value = _linear_mean(mu.space, mu)
        rep = BarycenterReport(value, [], True, True, denom, 0)
    elif method not in ("auto", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    else:
        if denom > cfg.size_cap:
            raise SizeCapError(
                f"weight denominator {denom} exceeds size cap {cfg.size_cap}")
        prev = None
        value = None
        increments = []
        evals = 0
        converged = False
        for k in range(1, cfg.replication_budget + 1):
            if denom * k > cfg.size_cap:
                break
            half = Fraction(1, 2)
            ctx = _Ctx(mu.space, lambda a, b: sigma(a, b, half), cfg)
            value = _derived(_sorted_tuple(expanded * k), ctx)
            evals += ctx.evals
            if prev is not None:
                inc = float(dist(mu.space, prev, value))
                increments.append(inc)
                if inc <= cfg.eps:
                    converged = True
                    break
            prev = value
        rep = BarycenterReport(value, increments, converged, False, denom, evals)

    if len(mu.support) == 2 and tuple(mu.weights) == (Fraction(1, 2), Fraction(1, 2)):
        mid = sigma(mu.support[0], mu.support[1], Fraction(1, 2))
        rep.midpoint_gap = float(dist(mu.space, rep.value, mid))
    return rep


def sigma_beta(space: Space, beta: Callable, name: str,
               grid: int = 120, **flags) -> Bicombing:
    """Join Diracs through a barycenter map: (x,y,t) -> beta((1-t)dx + t dy).

    beta takes a Measure; t must be a grid rational so the mixture has
    rational weights.
    """
    from .wasserstein import measure

    def ev(x, y, t):
        t = Fraction(t)
        return beta(measure(space, [(x, 1 - t), (y, t)]))

    return Bicombing(space, name, ev, grid=grid, **flags)


@dataclass
class HullResult:
    points: dict  # key -> point
    closed: bool
    iterations: int

    def distance_to(self, space: Space, q) -> float:
        return min(float(dist(space, p, q)) for p in self.points.values())


def approx_sigma_convex_hull(space: Space, seeds: Sequence, sigma: Bicombing,
                             depth: int = 3, t_steps: int = 4,
                             max_points: int = 4096) -> HullResult:
    """Close a seed set under sigma-joins on a t grid, up to `depth` rounds.

    Points are deduplicated exactly; the budget error carries the partial
    set because a truncated hull is still a usable inner approximation.
    """
    from .handles import grid_ts

    pts = {point_key(p): p for p in seeds}
    ts = [t for t in grid_ts(sigma.grid, t_steps) if 0 < t < 1]
    rounds = 0
    for _ in range(depth):
        new = {}
        items = list(pts.values())
        for i, x in enumerate(items):
            for y in items[i:]:
                for t in ts:
                    z = sigma(x, y, t)
                    k = point_key(z)
                    if k not in pts and k not in new:
                        new[k] = z
                        if len(pts) + len(new) > max_points:
                            raise BarycenterError(
                                f"hull exceeded {max_points} points at depth {rounds}")
        rounds += 1
        if not new:
            return HullResult(pts, True, rounds)
        pts.update(new)
    return HullResult(pts, False, rounds)
