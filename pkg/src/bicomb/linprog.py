"""Self-contained two-phase simplex, generic over exact and float arithmetic.

min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0

In exact mode every number is a Fraction and the returned optimum is exact;
in float mode a small pivot tolerance is used. Bland's rule keeps the exact
mode cycle-free; a pivot budget guards the float mode.

The problems solved here are small (transport plans, Lipschitz potentials,
half-plane barycenters), so a dense tableau is the right tool.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .rationals import Scalar


class LPError(Exception):
    pass


class LPBudgetError(LPError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Scalar]
    x: Optional[list]

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _pivot(rows, objs, basis, r, c):
    prow = rows[r]
    piv = prow[c]
    inv = 1 / piv if not isinstance(piv, Fraction) else Fraction(1) / piv
    rows[r] = prow = [v * inv for v in prow]
    for row in rows:
        if row is prow:
            continue
        f = row[c]
        if f:
            for j, pv in enumerate(prow):
                if pv:
                    row[j] -= f * pv
    for obj in objs:
        f = obj[c]
        if f:
            for j, pv in enumerate(prow):
                if pv:
                    obj[j] -= f * pv
    basis[r] = c


def _reduced_objective(rows, basis, cost, zero):
    ncol = len(cost)
    obj = list(cost) + [zero]
    for i, bi in enumerate(basis):
        cb = cost[bi]
        if cb:
            row = rows[i]
            for j in range(ncol + 1):
                if row[j]:
                    obj[j] -= cb * row[j]
    return obj


def _run_simplex(rows, basis, obj, tol, max_pivots):
    ncol = len(obj) - 1
    for _ in range(max_pivots):
        enter = -1
        for j in range(ncol):
            if obj[j] < -tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > tol:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(rows, [obj], basis, leave, enter)
    raise LPBudgetError(f"simplex exceeded {max_pivots} pivots")


def solve_lp(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    exact: bool = True,
    max_pivots: int = 20000,
) -> LPResult:
    if exact:
        num = Fraction
        tol = Fraction(0)
        feas_tol = Fraction(0)
    else:
        num = float
        tol = 1e-9
        feas_tol = 1e-7
    zero, one = num(0), num(1)

    c = [num(v) for v in c]
    n = len(c)
    rows = []
    needs_artificial = []
    n_ub = len(A_ub)
    ncol = n + n_ub  # orig + slacks; artificials appended later

    for k, (arow, b) in enumerate(zip(A_ub, b_ub)):
        row = [num(v) for v in arow] + [zero] * n_ub + [num(b)]
        row[n + k] = one
        if row[-1] < zero:
            row = [-v for v in row]
            needs_artificial.append(True)
        else:
            needs_artificial.append(False)
        rows.append(row)
    for arow, b in zip(A_eq, b_eq):
        row = [num(v) for v in arow] + [zero] * n_ub + [num(b)]
        if row[-1] < zero:
            row = [-v for v in row]
        rows.append(row)
        needs_artificial.append(True)

    basis = []
    art_cols = []
    for k, row in enumerate(rows):
        if needs_artificial[k]:
            art_cols.append(ncol + len(art_cols))
            basis.append(-1)  # placeholder, filled below
        else:
            basis.append(n + k)
    total_cols = ncol + len(art_cols)
    ai = 0
    for k, row in enumerate(rows):
        pad = [zero] * len(art_cols)
        if needs_artificial[k]:
            pad[ai] = one
            basis[k] = ncol + ai
            ai += 1
        rows[k] = row[:-1] + pad + [row[-1]]

    if art_cols:
        cost1 = [zero] * ncol + [one] * len(art_cols)
        obj1 = _reduced_objective(rows, basis, cost1, zero)
        status = _run_simplex(rows, basis, obj1, tol, max_pivots)
        if status != "optimal":
            raise LPError("phase 1 unbounded (cannot happen on valid input)")
        if -obj1[-1] > feas_tol:
            return LPResult("infeasible", None, None)
        # drive remaining artificials out of the basis or drop redundant rows
        drop = []
        for i in range(len(rows)):
            if basis[i] >= ncol:
                prow = rows[i]
                enter = -1
                for j in range(ncol):
                    if prow[j] > tol or prow[j] < -tol:
                        enter = j
                        break
                if enter >= 0:
                    _pivot(rows, [], basis, i, enter)
                else:
                    drop.append(i)
        for i in reversed(drop):
            del rows[i]
            del basis[i]
        rows = [row[:ncol] + [row[-1]] for row in rows]

    cost2 = c + [zero] * n_ub
    obj2 = _reduced_objective(rows, basis, cost2, zero)
    status = _run_simplex(rows, basis, obj2, tol, max_pivots)
    if status != "optimal":
        return LPResult("unbounded", None, None)

    x = [zero] * n
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = rows[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), zero)
    return LPResult("optimal", value, x)
