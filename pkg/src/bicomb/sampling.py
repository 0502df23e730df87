"""Deterministic sample generators for certification sweeps.

All randomness flows through numpy Generators seeded explicitly, so a run
config (seed included) pins every sampled witness.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .spaces import FiniteMetric, Space, SpaceError, validate_metric


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def sample_point(space: Space, rng, radius: float = 2.0, center=None):
    if space.kind == "finite":
        return int(rng.integers(space.metric.size))
    if space.kind == "linf":
        c = center or (0.0,) * space.dim
        return tuple(float(rng.uniform(ci - radius, ci + radius)) for ci in c)
    if space.kind == "halfplane":
        c = center or (0.0, 0.0)
        a = float(rng.uniform(c[0] - radius, c[0] + radius))
        b = float(rng.uniform(max(0.0, c[1] - radius), c[1] + radius))
        return (a, b)
    if space.kind == "tightspan":
        from .tightspan import sample_extremal

        return sample_extremal(space, rng)
    raise SpaceError(f"cannot sample points of {space.kind}")


def sample_points(space: Space, rng, count: int, radius: float = 2.0, center=None) -> list:
    return [sample_point(space, rng, radius, center) for _ in range(count)]


def sample_grid_t(rng, grid: int) -> Fraction:
    return Fraction(int(rng.integers(0, grid + 1)), grid)


def random_rational_metric(rng, n: int, denominator: int = 12) -> FiniteMetric:
    """Random finite metric with rational entries.

    Random positive rational weights are closed under shortest paths
    (Floyd-Warshall), which repairs the triangle inequality exactly.
    """
    d = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = Fraction(int(rng.integers(denominator, 4 * denominator + 1)), denominator)
            d[i][j] = d[j][i] = v
    for k in range(n):
        for i in range(n):
            for j in range(n):
                via = d[i][k] + d[k][j]
                if via < d[i][j]:
                    d[i][j] = via
    labels = [f"p{i}" for i in range(n)]
    return validate_metric(labels, d)


def random_weights(rng, k: int, denominator: int = 24) -> list:
    """k strictly positive rationals summing to 1 exactly."""
    while True:
        cuts = sorted(int(c) for c in rng.integers(1, denominator, size=k - 1)) if k > 1 else []
        parts = []
        prev = 0
        for c in cuts + [denominator]:
            parts.append(c - prev)
            prev = c
        if all(p > 0 for p in parts):
            return [Fraction(p, denominator) for p in parts]


def rational_point(rng, dim: int = 2, denominator: int = 8, radius: int = 2) -> tuple:
    return tuple(
        Fraction(int(rng.integers(-radius * denominator, radius * denominator + 1)), denominator)
        for _ in range(dim)
    )


def sample_conical_quadruples(space: Space, rng, count: int, grid: int,
                              radius: float = 2.0) -> list:
    out = []
    for _ in range(count):
        x = sample_point(space, rng, radius)
        y = sample_point(space, rng, radius)
        x2 = sample_point(space, rng, radius)
        y2 = sample_point(space, rng, radius)
        t = sample_grid_t(rng, grid)
        out.append((x, y, x2, y2, t))
    return out
