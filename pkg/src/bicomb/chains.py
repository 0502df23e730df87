"""Subdivision and chain constructions that improve a conical bicombing.

c(n; tau) takes sigma-midpoints of tau's (i-1)/n and (i+1)/n points;
sigma^(n) replaces tau by the fixed point of that midpoint relaxation; and
s^(n) selects sigma^(i) by the scale bracket d(x,y) in ((i-1)/n, i/n].
The payoff is quantitative: consistency defects of s^(n) fall like 2/n and
successive sigma^(n) are 1/(n+1)-close in D_o.
"""
from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .handles import Bicombing, DefectReport, GridError, max_defect_sweep
from .moduli import DoReport, SweepConfig, d_o, _fdist
from .sampling import rng_from_seed, sample_grid_t, sample_point
from .spaces import point_key


class ChainBudgetError(Exception):
    def __init__(self, message, chain):
        super().__init__(message)
        self.chain = chain


@dataclass(frozen=True)
class Chain:
    x: object
    y: object
    n: int
    points: tuple  # n+1 points, endpoints included
    residual: float  # max_i d(p_i, sigma-midpoint of its neighbors)
    iterations: int
    converged: bool


def default_chain_budget(n: int, eps: float) -> int:
    return int(50 * n * n * math.log10(1 / eps)) + 100


def _stop_tol(n: int, eps: float) -> float:
    # Jacobi midpoint relaxation on a path contracts like cos(pi/n) per
    # sweep; stopping on the update norm alone leaves an error amplified by
    # roughly 1/(1-cos), so shrink the update threshold accordingly.
    if n < 3:
        return eps
    return eps * (1 - math.cos(math.pi / n)) / 2


def _default_init(sigma: Bicombing, x, y, n: int) -> list:
    space = sigma.space
    if space.kind in ("linf", "halfplane"):
        return [tuple(a + (b - a) * i / n for a, b in zip(x, y))
                for i in range(n + 1)]
    if space.kind == "tightspan":
        from .tightspan import retract

        vx, vy = x.values, y.values
        out = [x]
        for i in range(1, n):
            out.append(retract(space, tuple(a + (b - a) * i / n
                                            for a, b in zip(vx, vy))))
        out.append(y)
        return out
    # fall back to sigma's own geodesic
    return [x] + [sigma(x, y, Fraction(i, n)) for i in range(1, n)] + [y]


def chain_fixed_point(sigma: Bicombing, x, y, n: int, eps: float = 1e-8,
                      budget: Optional[int] = None, init: Optional[list] = None) -> Chain:
    """Interior points of the n-chain from x to y: the fixed point of the
    simultaneous midpoint update x_i <- sigma(x_{i-1}, x_{i+1}, 1/2).

    Independent initializations land at the same chain (midpoint geodesy
    pins it down); the double-run agreement is an acceptance check, not an
    assumption here.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    space = sigma.space
    if n == 1:
        return Chain(x, y, 1, (x, y), 0.0, 0, True)
    budget = budget if budget is not None else default_chain_budget(n, eps)
    pts = list(init) if init is not None else _default_init(sigma, x, y, n)
    if len(pts) != n + 1:
        raise ValueError(f"initialization must carry {n + 1} points")
    pts[0], pts[n] = x, y
    half = Fraction(1, 2)
    stop = _stop_tol(n, eps)
    it = 0
    converged = False
    while it < budget:
        new = [sigma(pts[i - 1], pts[i + 1], half) for i in range(1, n)]
        upd = max(_fdist(space, a, b) for a, b in zip(new, pts[1:n]))
        pts[1:n] = new
        it += 1
        if upd <= stop:
            converged = True
            break
    residual = max(_fdist(space, pts[i], sigma(pts[i - 1], pts[i + 1], half))
                   for i in range(1, n))
    chain = Chain(x, y, n, tuple(pts), residual, it, converged)
    if not converged:
        raise ChainBudgetError(
            f"chain relaxation (n={n}) exhausted {budget} sweeps at "
            f"update {upd:.3e}", chain)
    return chain


def chain_fixed_point_batch(sigma: Bicombing, pairs: Sequence, n: int,
                            eps: float = 1e-8, budget: Optional[int] = None) -> list:
    """Lock-step relaxation of many n-chains at once through sigma's batch
    evaluator. Exact same update rule as the scalar path."""
    if not pairs:
        return []
    if sigma.batch_fn is None or sigma.space.kind not in ("linf", "halfplane"):
        return [chain_fixed_point(sigma, x, y, n, eps, budget) for x, y in pairs]
    if n == 1:
        return [Chain(x, y, 1, (x, y), 0.0, 0, True) for x, y in pairs]
    budget = budget if budget is not None else default_chain_budget(n, eps)
    C = len(pairs)
    dim = sigma.space.dim
    S = np.empty((C, n + 1, dim))
    for c, (x, y) in enumerate(pairs):
        xa, ya = np.asarray(x, float), np.asarray(y, float)
        for i in range(n + 1):
            S[c, i] = xa + (ya - xa) * (i / n)
    T = np.full(C * (n - 1), 0.5)
    stop = _stop_tol(n, eps)
    it = 0
    converged = False
    while it < budget:
        P = S[:, :-2, :].reshape(-1, dim)
        Q = S[:, 2:, :].reshape(-1, dim)
        new = sigma.batch_fn(P, Q, T).reshape(C, n - 1, dim)
        upd = float(np.max(np.abs(new - S[:, 1:-1, :])))
        S[:, 1:-1, :] = new
        it += 1
        if upd <= stop:
            converged = True
            break
    mid = sigma.batch_fn(S[:, :-2, :].reshape(-1, dim),
                         S[:, 2:, :].reshape(-1, dim), T).reshape(C, n - 1, dim)
    res = np.max(np.abs(mid - S[:, 1:-1, :]), axis=(1, 2))
    out = []
    for c, (x, y) in enumerate(pairs):
        points = (x,) + tuple(tuple(float(v) for v in S[c, i]) for i in range(1, n)) + (y,)
        chain = Chain(x, y, n, points, float(res[c]), it, converged)
        if not converged:
            raise ChainBudgetError(
                f"batched chain relaxation (n={n}) exhausted {budget} sweeps", chain)
        out.append(chain)
    return out


def chain_spacing_defect(space, chain: Chain) -> float:
    """Chains are metrically uniform: d(p_i, p_j) = |i-j|/n d(x,y)."""
    dxy = _fdist(space, chain.x, chain.y)
    worst = 0.0
    for i in range(chain.n + 1):
        for j in range(i + 1, chain.n + 1):
            got = _fdist(space, chain.points[i], chain.points[j])
            worst = max(worst, abs(got - (j - i) / chain.n * dxy))
    return worst


class ChainCache:
    """Bounded chain store keyed by (handle, n, endpoints); oldest out."""

    def __init__(self, maxsize: int = 8192):
        self.maxsize = maxsize
        self.data: OrderedDict = OrderedDict()

    def key(self, sigma, x, y, n):
        return (id(sigma), n, point_key(x), point_key(y))

    def get(self, sigma, x, y, n) -> Optional[Chain]:
        k = self.key(sigma, x, y, n)
        got = self.data.get(k)
        if got is not None:
            self.data.move_to_end(k)
        return got

    def put(self, sigma, x, y, n, chain: Chain):
        k = self.key(sigma, x, y, n)
        self.data[k] = chain
        self.data.move_to_end(k)
        while len(self.data) > self.maxsize:
            self.data.popitem(last=False)


_CACHE = ChainCache()


def get_chain(sigma: Bicombing, x, y, n: int, eps: float = 1e-8,
              budget: Optional[int] = None) -> Chain:
    got = _CACHE.get(sigma, x, y, n)
    if got is None:
        got = chain_fixed_point(sigma, x, y, n, eps, budget)
        _CACHE.put(sigma, x, y, n, got)
    return got


def warm_chain_cache(sigma: Bicombing, pairs: Sequence, n: int,
                     eps: float = 1e-8, budget: Optional[int] = None) -> int:
    """Batch-relax any uncached pairs; returns how many were computed."""
    todo = [p for p in pairs if _CACHE.get(sigma, p[0], p[1], n) is None]
    seen = set()
    uniq = []
    for x, y in todo:
        k = (point_key(x), point_key(y))
        if k not in seen:
            seen.add(k)
            uniq.append((x, y))
    for chain in chain_fixed_point_batch(sigma, uniq, n, eps, budget):
        _CACHE.put(sigma, chain.x, chain.y, n, chain)
    return len(uniq)


def subdivide(sigma: Bicombing, tau: Bicombing, n: int) -> Bicombing:
    """One subdivision round c(n; tau): chain point i is the sigma-midpoint
    of tau's (i-1)/n and (i+1)/n points; evaluation interpolates the chain
    with sigma."""
    if sigma.space != tau.space:
        raise GridError("subdivision inputs live on different spaces")
    grid = math.gcd(sigma.grid, tau.grid)
    if n < 1 or grid % n:
        raise GridError(f"common grid {grid} is not divisible by n={n}")
    half = Fraction(1, 2)
    cache: OrderedDict = OrderedDict()

    def chain_points(x, y):
        key = (point_key(x), point_key(y))
        got = cache.get(key)
        if got is None:
            got = [x]
            for i in range(1, n):
                got.append(sigma(tau(x, y, Fraction(i - 1, n)),
                                 tau(x, y, Fraction(i + 1, n)), half))
            got.append(y)
            cache[key] = got
            while len(cache) > 2048:
                cache.popitem(last=False)
        return got

    def ev(x, y, t):
        pts = chain_points(x, y)
        tn = Fraction(t) * n
        i = min(int(tn), n - 1)
        lam = tn - i
        return sigma(pts[i], pts[i + 1], lam)

    return Bicombing(sigma.space, f"subdiv({sigma.name},{tau.name};{n})", ev,
                     grid=grid, conical=sigma.conical and tau.conical)


def sigma_n(sigma: Bicombing, n: int, eps: float = 1e-8,
            budget: Optional[int] = None) -> Bicombing:
    """The bicombing assembled from chain fixed points; sigma_n with n=1 is
    sigma itself evaluated through the trivial chain."""
    if n < 1:
        raise ValueError("need n >= 1")

    def ev(x, y, t):
        ch = get_chain(sigma, x, y, n, eps, budget)
        tn = Fraction(t) * n
        i = min(int(tn), n - 1)
        lam = tn - i
        return sigma(ch.points[i], ch.points[i + 1], lam)

    g = sigma.grid * n // math.gcd(sigma.grid, n)
    return Bicombing(sigma.space, f"chain({sigma.name};{n})", ev, grid=g,
                     conical=sigma.conical, reversible=sigma.reversible,
                     linear=sigma.linear)


def composition_defect(sigma: Bicombing, n: int, k: int,
                       cfg: SweepConfig) -> DefectReport:
    """Chains compose: running sigma^(k) between chain points i and i+k of
    sigma^(n) retraces sigma^(n) on [i/n, (i+k)/n]. Both sides are computed
    independently and compared."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    rng = rng_from_seed(cfg.seed)
    space = sigma.space
    sn = sigma_n(sigma, n)
    sk = sigma_n(sigma, k)
    items = []
    for _ in range(cfg.samples):
        x = sample_point(space, rng, cfg.radius)
        y = sample_point(space, rng, cfg.radius)
        i = int(rng.integers(0, n - k + 1))
        lam = sample_grid_t(rng, sigma.grid)
        items.append((x, y, i, lam))

    def ev(item):
        x, y, i, lam = item
        ch = get_chain(sigma, x, y, n)
        lhs = sn(x, y, Fraction(i, n) + lam * Fraction(k, n))
        rhs = sk(ch.points[i], ch.points[i + k], lam)
        return _fdist(space, lhs, rhs)

    return max_defect_sweep("composition", items, ev, cfg.tolerance,
                            {"n": n, "k": k})


@dataclass(eq=False)
class PiecewiseBicombing(Bicombing):
    n: int = 0
    pieces: dict = field(default_factory=dict)

    def piece(self, i: int) -> Bicombing:
        got = self.pieces.get(i)
        if got is None:
            got = sigma_n(self.base, i, self.eps, self.budget)
            self.pieces[i] = got
        return got


def select_index(n: int, d: float) -> int:
    """Scale bracket d in ((i-1)/n, i/n] -> i, with a guard against float
    noise pushing an exact boundary upward."""
    if d <= 0:
        return 0
    return max(1, math.ceil(n * d - 1e-12))


def s_n(sigma: Bicombing, n: int, eps: float = 1e-8,
        budget: Optional[int] = None) -> PiecewiseBicombing:
    """Scale-selected bicombing: short pairs get sigma, longer pairs get
    finer chains. Selection jumps make it discontinuous in (x,y) across
    bracket boundaries; per pair it is still a geodesic."""
    space = sigma.space

    def ev(x, y, t):
        d = _fdist(space, x, y)
        i = select_index(n, d)
        if i == 0:
            return x
        return out.piece(i)(x, y, t)

    out = PiecewiseBicombing(space, f"scale({sigma.name};{n})", ev,
                             grid=sigma.grid, conical=sigma.conical,
                             reversible=sigma.reversible, n=n)
    out.base = sigma
    out.eps = eps
    out.budget = budget
    return out


def consistency_bound_check(sigma: Bicombing, n: int,
                            cfg: Optional[SweepConfig] = None) -> DefectReport:
    """Consistency defect of s^(n) against the 2/n bound.

    Samples share a pool of base pairs so the chain cache carries the
    sweep; chains are warmed in lock-step batches grouped by selection
    index when sigma supports batch evaluation.
    """
    cfg = cfg or SweepConfig(samples=500, radius=0.5, seed=0, tolerance=1e-7,
                             t_steps=24)
    rng = rng_from_seed(cfg.seed)
    space = sigma.space
    handle = s_n(sigma, n)
    n_pairs = max(1, cfg.samples // 20)
    pairs = [(sample_point(space, rng, cfg.radius),
              sample_point(space, rng, cfg.radius)) for _ in range(n_pairs)]
    items = []
    for idx in range(cfg.samples):
        x, y = pairs[idx % n_pairs]
        s = sample_grid_t(rng, cfg.t_steps)
        t = sample_grid_t(rng, cfg.t_steps)
        lam = sample_grid_t(rng, cfg.t_steps)
        items.append((x, y, s, t, lam))

    by_index: dict = {}
    for x, y in pairs:
        i = select_index(n, _fdist(space, x, y))
        if i > 1:
            by_index.setdefault(i, []).append((x, y))
    for i, grp in sorted(by_index.items()):
        warm_chain_cache(sigma, grp, i)

    inner_pairs = []
    per_item = []
    for x, y, s, t, lam in items:
        p = handle(x, y, s)
        q = handle(x, y, t)
        per_item.append((x, y, s, t, lam, p, q))
        j = select_index(n, _fdist(space, p, q))
        if j > 1:
            inner_pairs.append((j, p, q))
    by_index.clear()
    for j, p, q in inner_pairs:
        by_index.setdefault(j, []).append((p, q))
    for j, grp in sorted(by_index.items()):
        warm_chain_cache(sigma, grp, j)

    worst, witness = float("-inf"), None
    for x, y, s, t, lam, p, q in per_item:
        u = (1 - lam) * s + lam * t
        gap = _fdist(space, handle(x, y, u), handle(p, q, lam))
        if gap > worst:
            worst, witness = gap, (x, y, s, t, lam)
    bound = 2.0 / n
    return DefectReport("scale_consistency", worst, witness, len(items),
                        bound + cfg.tolerance, {"n": n, "bound": bound})


def cauchy_check(sigma: Bicombing, n: int, o,
                 cfg: Optional[SweepConfig] = None) -> DefectReport:
    """D_o between successive chain bicombings against the 1/(n+1) bound."""
    cfg = cfg or SweepConfig(samples=40, seed=0, tolerance=1e-6, t_steps=24)
    a = sigma_n(sigma, n)
    b = sigma_n(sigma, n + 1)
    rep: DoReport = d_o(a, b, o, k_max=3, pairs_per_level=cfg.samples,
                        t_steps=cfg.t_steps, seed=cfg.seed)
    bound = 1.0 / (n + 1)
    return DefectReport("cauchy_step", rep.value, rep.witness, rep.samples,
                        bound + cfg.tolerance,
                        {"n": n, "bound": bound, "exact": rep.exact,
                         "grid_upper_bound": rep.grid_upper_bound})
