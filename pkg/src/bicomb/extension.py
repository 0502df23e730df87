"""Constructive extension of a reversible conical bicombing to the
injective hull.

The store holds the partial barycenter map as (measure, value) pairs over
hull points, kept 1-Lipschitz against W1 greedily: every new value is
squeezed into the coordinate box cut out by the sup-norm balls around the
stored values (radius = W1 to the stored measure), then pushed onto the
hull by the retraction. Pairwise ball feasibility follows from the W1
triangle inequality, and a common point exists because the hull is
hyperconvex; the clip/retract loop is a heuristic solver whose output is
always re-verified, never trusted.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .handles import Bicombing, DefectReport, grid_ts, jsonable
from .moduli import _fdist, reversibility_defect, strengthened_defect
from .sampling import rng_from_seed, sample_grid_t, sample_point
from .spaces import Space
from .tightspan import ExtremalFunction, embed, retract, star_residual
from .wasserstein import Measure, dirac, measure, w1_general, w1_two_point


class ExtensionError(Exception):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ExtensionBudgetError(ExtensionError):
    def __init__(self, message, violation):
        super().__init__(message)
        self.violation = violation


def w1_measures(mu: Measure, nu: Measure) -> float:
    """W1 between measures with at most two atoms in closed form; the
    transportation LP beyond that."""
    space = mu.space
    a, wa = mu.support, mu.weights
    b, wb = nu.support, nu.weights
    if len(a) == 1 and len(b) == 1:
        return _fdist(space, a[0], b[0])
    if len(a) == 1:
        return float(sum(float(w) * _fdist(space, a[0], q)
                         for q, w in zip(b, wb)))
    if len(b) == 1:
        return float(sum(float(w) * _fdist(space, p, b[0])
                         for p, w in zip(a, wa)))
    if len(a) == 2 and len(b) == 2:
        # 2x2 transport cost is linear in the coupling parameter, so the
        # optimum sits at an end of its feasible interval; all-float here
        # because store radii never need exact arithmetic.
        s, t = float(wa[1]), float(wb[1])
        d00 = _fdist(space, a[0], b[0])
        d01 = _fdist(space, a[0], b[1])
        d10 = _fdist(space, a[1], b[0])
        d11 = _fdist(space, a[1], b[1])

        def cost(lam):
            return ((1 - s - t + lam) * d00 + (t - lam) * d01
                    + (s - lam) * d10 + lam * d11)

        return min(cost(max(0.0, s + t - 1.0)), cost(min(s, t)))
    return float(w1_general(mu, nu).value)


@dataclass
class StoreEntry:
    measure: Measure
    value: ExtremalFunction


class ConstraintStore:
    """Partial barycenter map on hull points, with the pairwise W1 cache
    that keeps extension queries 1-Lipschitz. Single-writer: all mutation
    funnels through extend_point."""

    def __init__(self, space: Space, sigma: Bicombing, grid: int, eps: float):
        self.space = space  # the hull
        self.sigma = sigma
        self.grid = grid
        self.eps = eps
        self.entries: list[StoreEntry] = []
        self.index: dict = {}
        self._w1: dict = {}
        self.gate_reports: list[DefectReport] = []

    def __len__(self):
        return len(self.entries)

    def lookup(self, nu: Measure) -> Optional[ExtremalFunction]:
        i = self.index.get(nu.key())
        return None if i is None else self.entries[i].value

    def w1(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        got = self._w1.get(key)
        if got is None:
            got = w1_measures(self.entries[key[0]].measure,
                              self.entries[key[1]].measure)
            self._w1[key] = got
        return got

    def _append(self, nu: Measure, value: ExtremalFunction):
        self.entries.append(StoreEntry(nu, value))
        self.index[nu.key()] = len(self.entries) - 1

    def lipschitz_invariant(self) -> DefectReport:
        """Full pairwise check: ||v_i - v_j||_inf - W1_ij over the store."""
        worst, witness = float("-inf"), None
        m = len(self.entries)
        for i in range(m):
            for j in range(i + 1, m):
                gap = (_fdist(self.space, self.entries[i].value,
                              self.entries[j].value) - self.w1(i, j))
                if gap > worst:
                    worst, witness = gap, (i, j)
        return DefectReport("store_lipschitz", worst, witness,
                            m * (m - 1) // 2, self.eps, {"entries": m})

    def to_dict(self) -> dict:
        return {
            "grid": self.grid,
            "eps": self.eps,
            "entries": [{"measure": e.measure.to_dict(),
                         "value": jsonable(e.value)}
                        for e in self.entries],
            "gates": [r.to_dict() for r in self.gate_reports],
        }


def build_S_map(sigma: Bicombing, grid: Optional[int] = None,
                eps: float = 1e-8) -> ConstraintStore:
    """Seed the store on the embedded base points: measures
    (1-t) d_{e(x)} + t d_{e(y)} on grid t with values sigma(e(x), e(y), t).

    Gate: sigma must be reversible and satisfy the strengthened conical
    inequality on the base points (that is what makes the seeded map
    1-Lipschitz); a failing gate refuses with the offending report.
    """
    space = sigma.space
    if space.kind != "tightspan":
        raise ExtensionError("extension needs a bicombing on a hull space")
    base = space.metric
    grid = grid or sigma.grid
    n = len(base.labels)
    pts = [embed(space, i) for i in range(n)]
    ts = grid_ts(grid, min(grid, 12) if grid % 12 == 0 else grid)

    rev_samples = [(pts[i], pts[j], t)
                   for i in range(n) for j in range(n) if i != j for t in ts]
    rev = reversibility_defect(sigma, samples=rev_samples, tolerance=eps)
    if not rev.passed:
        raise ExtensionError("reversibility gate failed", rev)
    str_samples = [(pts[a], pts[b], pts[c], pts[d], t)
                   for a in range(n) for b in range(n)
                   for c in range(n) for d in range(n)
                   if (a, b) < (c, d) for t in ts]
    strong = strengthened_defect(sigma, samples=str_samples, tolerance=eps)
    if not strong.passed:
        raise ExtensionError("strengthened-inequality gate failed", strong)

    store = ConstraintStore(space, sigma, grid, eps)
    store.gate_reports = [rev, strong]
    for i in range(n):
        store._append(dirac(space, pts[i]), pts[i])
    for i in range(n):
        for j in range(i + 1, n):
            for t in grid_ts(grid):
                if t == 0 or t == 1:
                    continue
                nu = measure(space, [(pts[i], 1 - t), (pts[j], t)])
                val = sigma(pts[i], pts[j], t)
                prev = store.lookup(nu)
                if prev is not None:
                    if _fdist(space, prev, val) > eps:
                        raise ExtensionError(
                            "seeding collision: same measure, different "
                            "values (bicombing not exactly reversible)")
                    continue
                store._append(nu, val)
    return store


def ball_intersection_point(space: Space, centers: Sequence, radii: Sequence,
                            eps: float = 1e-7, budget: int = 200):
    """Point of the hull within radii[s] of centers[s] for all s, found by
    alternating a clip into the coordinate box cut out by the sup-norm
    balls with the hull retraction. Returns (point, violation, iterations);
    the caller judges the violation."""
    dim = len(space.metric.labels)
    lo = [max(float(c.values[k]) - float(r) for c, r in zip(centers, radii))
          for k in range(dim)]
    hi = [min(float(c.values[k]) + float(r) for c, r in zip(centers, radii))
          for k in range(dim)]
    gap = max(l - h for l, h in zip(lo, hi))
    if gap > eps:
        raise ExtensionError(
            f"infeasible constraint box (corner gap {gap:.3e}); "
            "pairwise feasibility is violated")
    retr_eps = min(eps * 0.01, 1e-10)

    def clip(values):
        return tuple(min(max(v, l), h) for v, l, h in zip(values, lo, hi))

    w = retract(space, clip(lo), eps=retr_eps)
    viol = float("inf")
    for it in range(1, budget + 1):
        viol = max(max(_fdist(space, w, c) - float(r)
                       for c, r in zip(centers, radii)),
                   star_residual(space, w.values))
        if viol <= eps:
            return w, viol, it
        w = retract(space, clip(w.values), eps=retr_eps)
    return w, viol, budget


def extend_point(store: ConstraintStore, nu: Measure,
                 eps: Optional[float] = None, budget: int = 200) -> ExtremalFunction:
    """Value of the partial barycenter map at nu, constrained to stay
    1-Lipschitz against everything already stored.

    Algorithm per the box construction: radii r_s = W1(nu, measure_s);
    seed at the retracted lower corner of the box [max_s(v_s - r_s),
    min_s(v_s + r_s)]; alternate clip/retract until all ball constraints
    and extremality hold within eps. Success appends (nu, value) after an
    a-posteriori re-verification; budget exhaustion leaves the store
    untouched and reports the worst violation.
    """
    eps = store.eps if eps is None else eps
    space = store.space
    hit = store.lookup(nu)
    if hit is not None:
        return hit
    radii = [w1_measures(nu, e.measure) for e in store.entries]
    values = [e.value for e in store.entries]

    if len(nu.support) == 1:
        # a Dirac must map to its own atom; verify it fits the balls
        w = nu.support[0]
        if not isinstance(w, ExtremalFunction):
            w = retract(space, tuple(float(v) for v in w))
        viol = max((_fdist(space, w, v) - r for v, r in zip(values, radii)),
                   default=0.0)
        viol = max(viol, star_residual(space, w.values))
        if viol > eps:
            raise ExtensionBudgetError(
                f"Dirac atom violates stored constraints by {viol:.3e} "
                "(base map is not 1-Lipschitz at this point)", viol)
        store._append(nu, w)
        return w

    w, viol, _ = ball_intersection_point(space, values, radii,
                                         eps=eps, budget=budget)
    if viol > eps:
        raise ExtensionBudgetError(
            f"clip/retract stalled after {budget} rounds; worst ball "
            f"violation {viol:.3e} > eps={eps:.1e}", viol)
    # a posteriori: re-verify every constraint on the final point
    final = max((_fdist(space, w, v) - r for v, r in zip(values, radii)),
                default=0.0)
    final = max(final, star_residual(space, w.values))
    if final > eps:
        raise ExtensionBudgetError(
            f"verification pass found violation {final:.3e}", final)
    store._append(nu, w)
    return w


def _as_hull_point(space: Space, f) -> ExtremalFunction:
    if isinstance(f, ExtremalFunction):
        return f
    return ExtremalFunction(space, tuple(f),
                            star_residual(space, tuple(f)))


def _mixture(space: Space, f: ExtremalFunction, g: ExtremalFunction, t) -> Measure:
    t = Fraction(t)
    if t == 0:
        return dirac(space, f)
    if t == 1:
        return dirac(space, g)
    return measure(space, [(f, 1 - t), (g, t)])


def extension_handle(store: ConstraintStore, eps: Optional[float] = None,
                     budget: int = 200) -> Bicombing:
    """The extended bicombing as a handle: evaluation extends the
    two-point mixture through the store (Diracs first, so the geodesic
    constraints against the endpoints are active)."""
    space = store.space

    def ev(f, g, t):
        f = _as_hull_point(space, f)
        g = _as_hull_point(space, g)
        extend_point(store, dirac(space, f), eps, budget)
        extend_point(store, dirac(space, g), eps, budget)
        return extend_point(store, _mixture(space, f, g, t), eps, budget)

    return Bicombing(space, f"extend({store.sigma.name})", ev,
                     grid=store.grid, conical=True, reversible=True)


def extended_bicombing(store: ConstraintStore, f, g, grid: Optional[int] = None,
                       eps: Optional[float] = None, budget: int = 200) -> list:
    """Geodesic samples (t, value) of the extension between hull points f
    and g over grid t. For embedded base points the values are the stored
    seeds (restriction); the r=0 mechanism sends t=0,1 to f,g."""
    handle = extension_handle(store, eps, budget)
    grid = grid or store.grid
    return [(t, handle(f, g, t)) for t in grid_ts(grid)]


def certify_extension(store: ConstraintStore, samples: int = 200,
                      seed: int = 0, tolerance: float = 1e-6,
                      budget: int = 200) -> list:
    """Certificates for whatever extension the store realized: exact
    restriction to the seeded geodesics, conical/geodesic/reversibility
    defects over sampled hull points, and the full pairwise store
    invariant."""
    space = store.space
    sigma = store.sigma
    handle = extension_handle(store, budget=budget)
    n = len(space.metric.labels)
    pts = [embed(space, i) for i in range(n)]
    rng = rng_from_seed(seed)

    worst, witness = 0.0, None
    checked = 0
    for i in range(n):
        for j in range(i + 1, n):
            for t in grid_ts(store.grid):
                gap = _fdist(space, handle(pts[i], pts[j], t),
                             sigma(pts[i], pts[j], t))
                checked += 1
                if gap > worst:
                    worst, witness = gap, (i, j, t)
    restriction = DefectReport("restriction", worst, witness, checked, 0.0,
                               {"grid": store.grid})

    def draw():
        return sample_point(space, rng)

    worst, witness = float("-inf"), None
    for _ in range(samples):
        x1, x2, y1, y2 = draw(), draw(), draw(), draw()
        t = sample_grid_t(rng, store.grid)
        lhs = _fdist(space, handle(x1, x2, t), handle(y1, y2, t))
        rhs = ((1 - float(t)) * _fdist(space, x1, y1)
               + float(t) * _fdist(space, x2, y2))
        if lhs - rhs > worst:
            worst, witness = lhs - rhs, (x1, x2, y1, y2, t)
    conical = DefectReport("conical", worst, witness, samples, tolerance, {})

    worst, witness = float("-inf"), None
    geo_samples = max(1, samples // 4)
    for _ in range(geo_samples):
        f, g = draw(), draw()
        s = sample_grid_t(rng, store.grid)
        t = sample_grid_t(rng, store.grid)
        gap = abs(_fdist(space, handle(f, g, s), handle(f, g, t))
                  - abs(float(s) - float(t)) * _fdist(space, f, g))
        if gap > worst:
            worst, witness = gap, (f, g, s, t)
    geodesic = DefectReport("geodesic", worst, witness, geo_samples,
                            tolerance, {})

    worst, witness = float("-inf"), None
    for _ in range(geo_samples):
        f, g = draw(), draw()
        t = sample_grid_t(rng, store.grid)
        gap = _fdist(space, handle(f, g, t), handle(g, f, 1 - t))
        if gap > worst:
            worst, witness = gap, (f, g, t)
    reversibility = DefectReport("reversibility", worst, witness, geo_samples,
                                 tolerance, {})

    return [restriction, conical, geodesic, reversibility,
            store.lipschitz_invariant()]
