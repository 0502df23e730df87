"""Injective hulls (tight spans) of finite metric spaces.

E(X) is the set of extremal functions: f >= 0 with f(x) + f(y) >= d(x,y)
for all x, y, and f = f* where f*(x) = max_y (d(x,y) - f(y)). Under the sup
metric it is an injective superspace of X via e(x) = d(x, .).

Everything here works on small X, so plain tuples beat array overhead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .handles import Bicombing
from .spaces import Space, SpaceError, SpaceMismatchError, tightspan_space


class TightSpanError(SpaceError):
    pass


@dataclass(frozen=True)
class ExtremalFunction:
    space: Space
    values: tuple
    residual: float = field(default=0.0, compare=False)

    def __lt__(self, other):
        return self.values < other.values

    def __le__(self, other):
        return self.values <= other.values


def _check_ts(space: Space):
    if space.kind != "tightspan":
        raise SpaceMismatchError("expected a tight-span space")


def embed(space: Space, i: int) -> ExtremalFunction:
    """e(x_i) = d(x_i, .); an isometric embedding of X into E(X)."""
    _check_ts(space)
    fm = space.metric
    if not 0 <= i < fm.size:
        raise SpaceMismatchError(f"index {i} out of range")
    return ExtremalFunction(space, fm.fd[i])


def star(space: Space, f: Sequence[float]) -> tuple:
    """f*(x) = max_y (d(x,y) - f(y)); f is extremal iff f = f*."""
    _check_ts(space)
    fd = space.metric.fd
    return tuple(max(row[j] - f[j] for j in range(len(f))) for row in fd)


def delta_defect(space: Space, f: Sequence[float]) -> float:
    """How far f is from {g : g(x) + g(y) >= d(x,y)}; <= 0 means inside."""
    fd = space.metric.fd
    n = len(f)
    return max(fd[i][j] - f[i] - f[j] for i in range(n) for j in range(i, n))


def star_residual(space: Space, f: Sequence[float]) -> float:
    return max(abs(a - b) for a, b in zip(f, star(space, f)))


def is_extremal(space: Space, f, eps: float = 1e-9) -> bool:
    f = getattr(f, "values", f)
    if len(f) != space.metric.size:
        raise SpaceMismatchError("vector length mismatch")
    return star_residual(space, f) <= eps and delta_defect(space, f) <= eps


@dataclass
class RetractStats:
    iterations: int
    residual: float
    converged: bool


def retract_with_stats(space: Space, f: Sequence[float], eps: float = 1e-10,
                       budget: int = 100000):
    """Nonexpansive retraction of an arbitrary vector onto E(X).

    g0 = f v f* lands in the superlevel set Delta(X) = {g + g* >= ... } for
    any f; averaging g <- (g + g*)/2 stays in Delta(X), is pointwise
    nonincreasing, and fixes extremal functions. Stops when the star
    residual drops below eps; on budget exhaustion the last iterate is
    returned with its residual recorded (callers inspect `converged`).
    """
    _check_ts(space)
    f = tuple(float(v) for v in getattr(f, "values", f))
    n = space.metric.size
    if len(f) != n:
        raise SpaceMismatchError("vector length mismatch")
    fs = star(space, f)
    g = tuple(a if a > b else b for a, b in zip(f, fs))
    it = 0
    while True:
        gs = star(space, g)
        res = max(abs(a - b) for a, b in zip(g, gs))
        if res <= eps or it >= budget:
            return (ExtremalFunction(space, g, res),
                    RetractStats(it, res, res <= eps))
        nxt = tuple((a + b) / 2 for a, b in zip(g, gs))
        for a, b in zip(nxt, g):
            # monotone descent and nonnegativity, up to float noise
            if a > b + 1e-12 or a < -1e-12:
                raise TightSpanError("retraction iteration left its invariant region")
        g = nxt
        it += 1


def retract(space: Space, f, eps: float = 1e-10, budget: int = 100000) -> ExtremalFunction:
    out, _ = retract_with_stats(space, f, eps, budget)
    return out


def ex_bicombing(space: Space, eps: float = 1e-10, budget: int = 100000) -> Bicombing:
    """Geodesic bicombing on E(X): retract the ambient affine segment.

    Retraction is nonexpansive and the ambient segment is linear, so the
    conical inequality survives; certification sweeps re-check it.
    """
    _check_ts(space)

    def ev(f: ExtremalFunction, g: ExtremalFunction, t):
        tf = float(t)
        seg = tuple(a + tf * (b - a) for a, b in zip(f.values, g.values))
        return retract(space, seg, eps, budget)

    return Bicombing(space, "exhull", ev, conical=True, reversible=True)


def lipschitz_extend_real(space: Space, fvals: Sequence[float], y,
                          tol: float = 1e-9) -> float:
    """Extend a 1-Lipschitz real function on X to y in E(X) by the largest
    1-Lipschitz extension g(y) = min_x (f(x) + d(y, e(x)))."""
    _check_ts(space)
    fd = space.metric.fd
    n = len(fd)
    fvals = [float(v) for v in fvals]
    if len(fvals) != n:
        raise SpaceMismatchError("need one value per ground point")
    for i in range(n):
        for j in range(n):
            if fvals[i] - fvals[j] > fd[i][j] + tol:
                raise TightSpanError(
                    f"not 1-Lipschitz at ({i},{j}): gap {fvals[i] - fvals[j] - fd[i][j]}")
    yv = getattr(y, "values", y)
    return min(fvals[i] + max(abs(a - b) for a, b in zip(yv, embed(space, i).values))
               for i in range(n))


def sample_extremal(space: Space, rng, eps: float = 1e-10) -> ExtremalFunction:
    """A random point of E(X): retract a random vector from [0, diam]^X or a
    random pair mix, both giving reasonable coverage of the polytope."""
    _check_ts(space)
    fm = space.metric
    diam = float(fm.diameter)
    n = fm.size
    if n > 1 and rng.random() < 0.5:
        i, j = rng.choice(n, size=2, replace=False)
        t = float(rng.random())
        ei, ej = embed(space, int(i)).values, embed(space, int(j)).values
        seed = tuple(a + t * (b - a) for a, b in zip(ei, ej))
    else:
        seed = tuple(float(v) for v in rng.uniform(0, diam, size=n))
    return retract(space, seed, eps)


def embedding_isometry_defect(space: Space, sample_pairs=None) -> float:
    """max |d_E(e(x), e(y)) - d(x,y)| over pairs; should be float-zero."""
    fm = space.metric
    worst = 0.0
    for i in range(fm.size):
        for j in range(fm.size):
            de = max(abs(a - b) for a, b in zip(embed(space, i).values,
                                                embed(space, j).values))
            worst = max(worst, abs(de - fm.fd[i][j]))
    return worst


def make_tightspan(fm) -> Space:
    return tightspan_space(fm)
