"""Bicombing handles, isometries, and defect reports.

A bicombing handle packages an evaluation map (x, y, t) -> point together
with the space it lives on and the properties its construction claims.
Claims are inputs to the certification sweeps, never trusted outputs.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .rationals import format_rational
from .spaces import Space, SpaceMismatchError, dist, point_key


class GridError(ValueError):
    pass


@dataclass(eq=False)
class Bicombing:
    space: Space
    name: str
    eval_fn: Callable
    grid: int = 120  # advisory denominator for parameter sampling
    conical: bool = False
    reversible: bool = False
    consistent: bool = False
    linear: bool = False  # affine in coordinates; enables closed forms
    batch_fn: Optional[Callable] = None  # (P, Q, T) arrays -> array

    def __call__(self, x, y, t):
        if t == 0:
            return x
        if t == 1:
            return y
        return self.eval_fn(x, y, t)

    def cached(self) -> "Bicombing":
        """Same bicombing with a memo on (x, y, t); for deeply wrapped maps."""
        memo = {}
        inner = self.__call__

        def cached_eval(x, y, t):
            key = (point_key(x), point_key(y), t)
            v = memo.get(key)
            if v is None:
                v = inner(x, y, t)
                memo[key] = v
            return v

        return Bicombing(self.space, self.name, cached_eval, self.grid,
                         self.conical, self.reversible, self.consistent,
                         self.linear, self.batch_fn)


def grid_ts(grid: int, steps: Optional[int] = None) -> list:
    """Grid parameters j/m as Fractions; `steps` subsamples evenly."""
    if steps is None or steps >= grid:
        return [Fraction(j, grid) for j in range(grid + 1)]
    if steps < 1 or grid % steps:
        raise GridError(f"{steps} does not divide grid {grid}")
    step = grid // steps
    return [Fraction(j, grid) for j in range(0, grid + 1, step)]


def linear_bicombing(space: Space) -> Bicombing:
    if space.kind not in ("linf", "halfplane"):
        raise SpaceMismatchError("linear bicombing needs a coordinate space")

    def ev(x, y, t):
        return tuple(a + t * (b - a) for a, b in zip(x, y))

    def ev_batch(P, Q, T):
        return P + T[:, None] * (Q - P)

    return Bicombing(space, "linear", ev, conical=True, reversible=True,
                     consistent=True, linear=True, batch_fn=ev_batch)


@dataclass
class Isometry:
    space: Space
    forward: Callable
    inverse: Callable
    name: str = ""


def identity_isometry(space: Space) -> Isometry:
    return Isometry(space, lambda p: p, lambda p: p, "id")


@dataclass
class DefectReport:
    prop: str
    max_violation: float
    witness: Optional[tuple]
    samples: int
    tolerance: float
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        # tolerance None marks an informational report with no pass bar
        if self.tolerance is None:
            return True
        return self.max_violation <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "property": self.prop,
            "max_violation": float(self.max_violation),
            "witness": jsonable(self.witness),
            "samples": int(self.samples),
            "tolerance": None if self.tolerance is None else float(self.tolerance),
            "passed": bool(self.passed),
            "meta": jsonable(self.meta),
        }


def jsonable(obj):
    """Recursively convert points, Fractions and reports to JSON-safe data."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        return float(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (tuple, list)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "values") and isinstance(getattr(obj, "values"), tuple):
        return [jsonable(v) for v in obj.values]
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalar fallback
        return jsonable(obj.item())
    return repr(obj)


def max_defect_sweep(prop, items, evaluate, tolerance, meta=None) -> DefectReport:
    """Run `evaluate` over items, tracking the max violation and its witness."""
    worst = float("-inf")
    witness = None
    count = 0
    for item in items:
        v = evaluate(item)
        count += 1
        if v > worst:
            worst = float(v)
            witness = item
    if count == 0:
        worst = 0.0
    return DefectReport(prop, worst, witness, count, tolerance, meta or {})


def endpoint_defect(sigma: Bicombing, pairs) -> DefectReport:
    """sigma(x,y,0)=x, sigma(x,y,1)=y; exactness is part of the handle contract."""

    def ev(pair):
        x, y = pair
        return max(float(dist(sigma.space, sigma(x, y, Fraction(0)), x)),
                   float(dist(sigma.space, sigma(x, y, Fraction(1)), y)))

    return max_defect_sweep("endpoints", pairs, ev, 0.0)
