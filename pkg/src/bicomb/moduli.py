"""The moduli space of conical bicombings on a fixed space.

Defect checkers turn every bicombing property into a measured quantity
with a witness; D_o is the weighted-supremum metric comparing two
bicombings near a basepoint; interpolation, reversal, conjugation and
involution symmetrization are the constructive operators on handles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .handles import (Bicombing, DefectReport, GridError, Isometry,
                      linear_bicombing, max_defect_sweep)
from .sampling import rng_from_seed, sample_grid_t, sample_point
from .spaces import Space, SpaceMismatchError, dist
from .wasserstein import w1_two_point


class PreconditionError(Exception):
    def __init__(self, message: str, report: DefectReport):
        super().__init__(message)
        self.report = report


class InvolutionError(ValueError):
    pass


@dataclass
class SweepConfig:
    samples: int = 1000
    radius: float = 2.0
    seed: int = 0
    tolerance: float = 1e-8
    t_steps: int = 24  # grid subsample for checks sweeping over t


def _fdist(space, p, q) -> float:
    return float(dist(space, p, q))


# ---- per-property violation evaluators (witness re-evaluation uses these) --

def _ev_conical(sigma, item):
    x, y, x2, y2, t = item
    s = sigma.space
    lhs = _fdist(s, sigma(x, y, t), sigma(x2, y2, t))
    rhs = (1 - float(t)) * _fdist(s, x, x2) + float(t) * _fdist(s, y, y2)
    return lhs - rhs


def _ev_geodesic(sigma, item):
    x, y, s, t = item
    sp = sigma.space
    lhs = _fdist(sp, sigma(x, y, s), sigma(x, y, t))
    return abs(lhs - abs(float(s) - float(t)) * _fdist(sp, x, y))


def _ev_reversibility(sigma, item):
    x, y, t = item
    return _fdist(sigma.space, sigma(x, y, t), sigma(y, x, 1 - t))


def _ev_consistency(sigma, item):
    x, y, s, t, lam = item
    p = sigma(x, y, s)
    q = sigma(x, y, t)
    u = (1 - lam) * s + lam * t
    return _fdist(sigma.space, sigma(x, y, u), sigma(p, q, lam))


def _ev_straightness(sigma, item):
    x, y, z, s, t = item
    sp = sigma.space
    mid = sigma(x, y, (s + t) / 2)
    return (_fdist(sp, z, mid)
            - (_fdist(sp, z, sigma(x, y, s)) + _fdist(sp, z, sigma(x, y, t))) / 2)


def _ev_convexity(sigma, item):
    x, y, x2, y2, s, t = item
    sp = sigma.space

    def gap(u):
        return _fdist(sp, sigma(x, y, u), sigma(x2, y2, u))

    return gap((s + t) / 2) - (gap(s) + gap(t)) / 2


def _ev_strengthened(sigma, item):
    x1, x2, y1, y2, t = item
    sp = sigma.space
    lhs = _fdist(sp, sigma(x1, x2, t), sigma(y1, y2, t))
    w1, _ = w1_two_point(sp, x1, x2, t, y1, y2, t)
    conical_rhs = (1 - float(t)) * _fdist(sp, x1, y1) + float(t) * _fdist(sp, x2, y2)
    if float(w1) > conical_rhs + 1e-12:
        raise AssertionError(
            "two-point W1 exceeded the conical bound; transport routes disagree")
    return lhs - float(w1)


_EVALUATORS = {
    "conical": _ev_conical,
    "geodesic": _ev_geodesic,
    "reversibility": _ev_reversibility,
    "consistency": _ev_consistency,
    "straightness": _ev_straightness,
    "convexity": _ev_convexity,
    "strengthened": _ev_strengthened,
}


def evaluate_witness(sigma: Bicombing, prop: str, witness: tuple) -> float:
    return _EVALUATORS[prop](sigma, witness)


def _gen_samples(sigma: Bicombing, prop: str, cfg: SweepConfig,
                 equal_length: bool = False) -> list:
    rng = rng_from_seed(cfg.seed)
    space = sigma.space
    grid = sigma.grid

    def pt():
        return sample_point(space, rng, cfg.radius)

    def t():
        return sample_grid_t(rng, grid)

    items = []
    for _ in range(cfg.samples):
        if prop in ("conical", "strengthened"):
            items.append((pt(), pt(), pt(), pt(), t()))
        elif prop == "geodesic":
            items.append((pt(), pt(), t(), t()))
        elif prop == "reversibility":
            items.append((pt(), pt(), t()))
        elif prop == "consistency":
            items.append((pt(), pt(), t(), t(), t()))
        elif prop == "straightness":
            items.append((pt(), pt(), pt(), t(), t()))
        elif prop == "convexity":
            x, y = pt(), pt()
            if equal_length:
                x2, y2 = _translate_pair(space, x, y, rng, cfg.radius)
            else:
                x2, y2 = pt(), pt()
            items.append((x, y, x2, y2, t(), t()))
        else:
            raise ValueError(f"unknown property {prop!r}")
    return items


def _translate_pair(space, x, y, rng, radius):
    """Translate (x, y) by a common vector: sup-norm length is preserved, so
    the pair is admissible for the equal-length convexity test."""
    if space.kind not in ("linf", "halfplane"):
        raise SpaceMismatchError("equal-length sampling needs a coordinate space")
    v = [float(rng.uniform(-radius, radius)) for _ in range(space.dim)]
    if space.kind == "halfplane":
        floor = -min(x[1], y[1])
        v[1] = float(rng.uniform(floor, radius))
    x2 = tuple(a + b for a, b in zip(x, v))
    y2 = tuple(a + b for a, b in zip(y, v))
    return x2, y2


def _resolve(sigma, samples, prop, equal_length=False):
    if isinstance(samples, SweepConfig):
        return _gen_samples(sigma, prop, samples, equal_length), samples.tolerance
    return list(samples), None


def _run(sigma, prop, samples, tolerance, equal_length=False, meta=None):
    items, cfg_tol = _resolve(sigma, samples, prop, equal_length)
    tol = tolerance if tolerance is not None else (cfg_tol or 1e-8)
    return max_defect_sweep(prop, items,
                            lambda it: _EVALUATORS[prop](sigma, it), tol, meta)


def conical_defect(sigma, samples, tolerance=None) -> DefectReport:
    return _run(sigma, "conical", samples, tolerance)


def geodesic_defect(sigma, samples, tolerance=None) -> DefectReport:
    return _run(sigma, "geodesic", samples, tolerance)


def reversibility_defect(sigma, samples, tolerance=None) -> DefectReport:
    return _run(sigma, "reversibility", samples, tolerance)


def consistency_defect(sigma, samples, tolerance=None) -> DefectReport:
    return _run(sigma, "consistency", samples, tolerance)


def straightness_defect(sigma, samples, tolerance=None) -> DefectReport:
    return _run(sigma, "straightness", samples, tolerance)


def convexity_defect(sigma, pairs, equal_length_only: bool = True,
                     tolerance=None) -> DefectReport:
    rep = _run(sigma, "convexity", pairs, tolerance,
               equal_length=equal_length_only,
               meta={"equal_length_only": equal_length_only})
    return rep


def strengthened_defect(sigma, samples, tolerance=None,
                        precheck: Optional[SweepConfig] = None) -> DefectReport:
    """Two-point W1 refinement of the conical inequality; only meaningful
    for reversible bicombings, so reversibility is gated first."""
    pre_cfg = precheck or SweepConfig(samples=200, seed=11, tolerance=1e-9)
    rev = reversibility_defect(sigma, pre_cfg)
    if not rev.passed:
        raise PreconditionError(
            f"reversibility defect {rev.max_violation:.3e} exceeds "
            f"{rev.tolerance:.1e}; the strengthened bound needs a reversible input",
            rev)
    rep = _run(sigma, "strengthened", samples, tolerance)
    rep.meta["reversibility_precheck"] = rev.max_violation
    return rep


# ---------------------------------- D_o -------------------------------------

@dataclass
class DoReport:
    value: float
    exact: bool
    witness: Optional[tuple]  # (k, x, y, t)
    grid_upper_bound: Optional[float]
    samples: int
    meta: dict = field(default_factory=dict)


def _common_grid(sigma: Bicombing, tau: Bicombing) -> int:
    return math.gcd(sigma.grid, tau.grid)


def d_o(sigma: Bicombing, tau: Bicombing, o, k_max: int = 3,
        pairs_per_level: int = 40, t_steps: int = 24, seed: int = 0,
        extra_pairs: Sequence = ()) -> DoReport:
    """sup over k >= 0, pairs in the 2^k ball around o, and grid t of
    3^{-k} d(sigma_xy(t), tau_xy(t)).

    Exact on finite spaces (pairs enumerated; the k-sup stabilizes once the
    ball is everything, and later terms only shrink by 3^{-k}). On
    coordinate spaces the value is a certified lower bound from sampled
    pairs; the grid upper bound adds the t-grid modulus d(x,y)/t_steps per
    sampled pair (both maps move at speed d(x,y) in t).
    """
    if sigma.space != tau.space:
        raise SpaceMismatchError("bicombings live on different spaces")
    space = sigma.space
    grid = _common_grid(sigma, tau)
    steps = t_steps if t_steps and grid % t_steps == 0 else grid
    ts = [Fraction(j * (grid // steps), grid) for j in range(steps + 1)]

    def pair_gap(x, y):
        best, best_t = -1.0, None
        for t in ts:
            g = _fdist(space, sigma(x, y, t), tau(x, y, t))
            if g > best:
                best, best_t = g, t
        return best, best_t

    value, witness, ub = 0.0, None, 0.0
    count = 0
    if space.kind == "finite":
        pts = list(range(space.metric.size))
        k = 0
        while True:
            scale = 3.0 ** (-k)
            ball = [p for p in pts if float(dist(space, o, p)) <= 2.0 ** k]
            for x in ball:
                for y in ball:
                    g, gt = pair_gap(x, y)
                    count += 1
                    if scale * g > value:
                        value = scale * g
                        witness = (k, x, y, gt)
                    ub = max(ub, scale * (g + _fdist(space, x, y) / steps))
            if len(ball) == len(pts) or k >= k_max + 8:
                break
            k += 1
        return DoReport(value, True, witness, ub, count, {"k_stop": k})

    rng = rng_from_seed(seed)
    for k in range(k_max + 1):
        scale = 3.0 ** (-k)
        radius = 2.0 ** k
        pairs = [(sample_point(space, rng, radius, center=tuple(float(v) for v in o)),
                  sample_point(space, rng, radius, center=tuple(float(v) for v in o)))
                 for _ in range(pairs_per_level)]
        for x, y in extra_pairs:
            if float(dist(space, o, x)) <= radius and float(dist(space, o, y)) <= radius:
                pairs.append((x, y))
        for x, y in pairs:
            g, gt = pair_gap(x, y)
            count += 1
            if scale * g > value:
                value = scale * g
                witness = (k, x, y, gt)
            ub = max(ub, scale * (g + _fdist(space, x, y) / steps))
    return DoReport(value, False, witness, ub, count, {"k_max": k_max})


# ------------------------------- operators ----------------------------------

def _default_phi(space: Space, phi: Optional[Bicombing]) -> Bicombing:
    if phi is not None:
        return phi
    if space.kind in ("linf", "halfplane"):
        return linear_bicombing(space)
    raise SpaceMismatchError("no default interpolator on this space; pass phi")


def interpolate(sigma: Bicombing, tau: Bicombing, t, phi: Optional[Bicombing] = None) -> Bicombing:
    """Phi_{sigma,tau}(t): run phi between the two geodesics pointwise."""
    if sigma.space != tau.space:
        raise SpaceMismatchError("bicombings live on different spaces")
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise GridError("interpolation parameter must lie in [0,1]")
    phi = _default_phi(sigma.space, phi)
    if phi.space != sigma.space:
        raise SpaceMismatchError("interpolator lives on a different space")
    grid = _common_grid(sigma, tau)
    if grid < 1:
        raise GridError("incompatible grids")

    def ev(x, y, s):
        return phi(sigma(x, y, s), tau(x, y, s), t)

    batch = None
    if sigma.batch_fn and tau.batch_fn and phi.batch_fn:
        import numpy as np

        tf = float(t)

        def batch(P, Q, T):
            A = sigma.batch_fn(P, Q, T)
            B = tau.batch_fn(P, Q, T)
            return phi.batch_fn(A, B, np.full(len(A), tf))

    return Bicombing(sigma.space, f"interp({sigma.name},{tau.name};{t})", ev,
                     grid=grid,
                     conical=sigma.conical and tau.conical and phi.conical,
                     reversible=sigma.reversible and tau.reversible,
                     linear=sigma.linear and tau.linear and phi.linear,
                     batch_fn=batch)


def reversal_step(tau: Bicombing, base: Bicombing) -> Bicombing:
    """r(tau)(x,y,t) = base-midpoint of tau_xy(t) and tau_yx(1-t).

    With a reversible base, one step is already reversible (the midpoint is
    symmetric in its arguments); the defect sweep confirms rather than
    assumes this.
    """
    if tau.space != base.space:
        raise SpaceMismatchError("bicombings live on different spaces")
    half = Fraction(1, 2)

    def ev(x, y, t):
        return base(tau(x, y, t), tau(y, x, 1 - t), half)

    return Bicombing(tau.space, f"rev({tau.name})", ev,
                     grid=_common_grid(tau, base),
                     conical=tau.conical and base.conical,
                     reversible=base.reversible)


@dataclass
class ReversalTrace:
    handle: Bicombing
    trace: list
    converged: bool


def iterate_reversal(tau: Bicombing, base: Bicombing, eps: float = 1e-9,
                     budget: int = 8, cfg: Optional[SweepConfig] = None) -> ReversalTrace:
    """Iterate reversal_step until the reversibility defect (on a fixed
    sample set) drops below eps. Convergence is an empirical finding, not a
    guarantee; the trace is the deliverable."""
    cfg = cfg or SweepConfig(samples=200, seed=5, tolerance=eps)
    samples = _gen_samples(tau, "reversibility", cfg)
    cur = tau
    trace = []
    for _ in range(max(budget, 0) + 1):
        rep = _run(cur, "reversibility", samples, eps)
        trace.append(rep.max_violation)
        if rep.max_violation <= eps:
            return ReversalTrace(cur, trace, True)
        if len(trace) > budget:
            break
        cur = reversal_step(cur, base).cached()
    return ReversalTrace(cur, trace, False)


def conjugate(tau: Bicombing, iso: Isometry) -> Bicombing:
    """F(tau)(x,y,t) = f^{-1}(tau(f(x), f(y), t)); preserves every defect."""
    if tau.space != iso.space:
        raise SpaceMismatchError("isometry lives on a different space")

    def ev(x, y, t):
        return iso.inverse(tau(iso.forward(x), iso.forward(y), t))

    return Bicombing(tau.space, f"conj({tau.name},{iso.name})", ev,
                     grid=tau.grid, conical=tau.conical,
                     reversible=tau.reversible, consistent=tau.consistent)


def equivariance_defect(sigma: Bicombing, iso: Isometry, cfg: SweepConfig) -> DefectReport:
    rng = rng_from_seed(cfg.seed)
    space = sigma.space
    items = [(sample_point(space, rng, cfg.radius),
              sample_point(space, rng, cfg.radius),
              sample_grid_t(rng, sigma.grid)) for _ in range(cfg.samples)]

    def ev(item):
        x, y, t = item
        return _fdist(space, iso.forward(sigma(x, y, t)),
                      sigma(iso.forward(x), iso.forward(y), t))

    return max_defect_sweep("equivariance", items, ev, cfg.tolerance,
                            {"isometry": iso.name})


def symmetrize_involution(tau: Bicombing, iso: Isometry,
                          phi: Optional[Bicombing] = None,
                          cfg: Optional[SweepConfig] = None) -> Bicombing:
    """Average tau with its conjugate under an involutive isometry.

    Output is equivariant under iso up to tolerance: conjugating swaps the
    two interpolation arguments, and the midpoint of a reversible phi is
    symmetric in them.
    """
    cfg = cfg or SweepConfig(samples=100, seed=3, tolerance=1e-9)
    rng = rng_from_seed(cfg.seed)
    worst, wit = 0.0, None
    for _ in range(cfg.samples):
        p = sample_point(tau.space, rng, cfg.radius)
        gap = _fdist(tau.space, iso.forward(iso.forward(p)), p)
        if gap > worst:
            worst, wit = gap, p
    if worst > cfg.tolerance:
        raise InvolutionError(
            f"f(f(p)) misses p by {worst:.3e} at {wit}; not an involution")
    phi = _default_phi(tau.space, phi)
    out = interpolate(tau, conjugate(tau, iso), Fraction(1, 2), phi)
    out.name = f"sym({tau.name},{iso.name})"
    return out
