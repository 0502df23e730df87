"""Minimum-cost perfect assignment via the O(n^3) potentials method.

Generic over the numeric type of the cost matrix: Fractions give an exact
optimum, floats a numeric one. Nothing here assumes metric structure.
"""
from __future__ import annotations

from typing import Sequence


class AssignmentError(ValueError):
    pass


def min_cost_assignment(cost: Sequence[Sequence]) -> tuple:
    """Return (total_cost, perm) with perm[i] the column matched to row i.

    The matrix must be square. total_cost is recomputed from the selected
    entries, so with Fraction input it is exact.
    """
    n = len(cost)
    if n == 0:
        raise AssignmentError("empty cost matrix")
    if any(len(row) != n for row in cost):
        raise AssignmentError("cost matrix must be square")

    zero = cost[0][0] * 0
    big = sum((abs(v) for row in cost for v in row), zero) + 1

    u = [zero] * (n + 1)
    v = [zero] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row (1-based) matched to column j; p[0] is scratch
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [big] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = big
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    perm = [0] * n
    for j in range(1, n + 1):
        perm[p[j] - 1] = j - 1
    total = sum((cost[i][perm[i]] for i in range(n)), zero)
    return total, perm
