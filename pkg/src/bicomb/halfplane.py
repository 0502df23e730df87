"""The closed half-plane H in the sup-norm plane and its tent bicombing.

H carries a barycenter map beta(mu) = (beta_1, beta_2) with
beta_i(mu) = inf over p in H of (p_i + W1(delta_p, mu)); joining two Diracs
through beta gives a conical bicombing sigma_H that disagrees with the
linear one, which is what makes the moduli space interesting.

Two independent evaluation routes are kept: a linear program (exact
rational arithmetic whenever the inputs are rational), and an enumeration
of the break-line arrangement vertices of the piecewise-linear objective.
The enumeration is what makes batch sweeps affordable; the LP certifies it.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .handles import Bicombing
from .linprog import LPError, solve_lp
from .spaces import Space, SpaceMismatchError, halfplane_space
from .wasserstein import Measure, measure


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _atoms(mu: Measure):
    if mu.space.kind != "halfplane":
        raise SpaceMismatchError("expected a half-plane measure")
    return list(mu.support), list(mu.weights)


def beta_lp(mu: Measure):
    """LP route: min z_i + sum_j w_j u_j with u_j >= |z - x_j|_inf, z in H.

    z1 is split into a difference of nonnegatives; z2 >= 0 is the H
    constraint. Exact if every atom coordinate is rational.
    """
    points, weights = _atoms(mu)
    exact = all(_is_exact(c) for p in points for c in p)
    m = len(points)
    nvar = 3 + m  # zp, zm, z2, u_1..u_m
    A_ub, b_ub = [], []
    for j, (a, b) in enumerate(points):
        for sign in (1, -1):
            row = [0] * nvar
            row[0] = sign
            row[1] = -sign
            row[3 + j] = -1
            A_ub.append(row)
            b_ub.append(sign * a)
            row = [0] * nvar
            row[2] = sign
            row[3 + j] = -1
            A_ub.append(row)
            b_ub.append(sign * b)
    out = []
    for i in (1, 2):
        c = [0] * nvar
        if i == 1:
            c[0], c[1] = 1, -1
        else:
            c[2] = 1
        for j, w in enumerate(weights):
            c[3 + j] = w
        res = solve_lp(c, A_ub=A_ub, b_ub=b_ub, exact=exact)
        if not res.ok:
            raise LPError(f"beta LP unexpectedly {res.status}")
        out.append(res.value)
    return tuple(out)


def _cross(k1, c1, k2, c2, exact: bool):
    # kinds: 'h' z2=c, 'v' z1=c, 'p' z1-z2=c, 'm' z1+z2=c
    if k1 == k2:
        return None
    if k1 > k2:
        k1, c1, k2, c2 = k2, c2, k1, c1
    # sorted kind pairs: (h,m) (h,p) (h,v) (m,p) (m,v) (p,v)
    if k1 == "h":
        if k2 == "v":
            return (c2, c1)
        if k2 == "p":
            return (c2 + c1, c1)
        return (c2 - c1, c1)  # m
    if k1 == "m":
        if k2 == "v":
            return (c2, c1 - c2)
        # p: z1+z2=c1, z1-z2=c2
        if exact:
            return (Fraction(c1 + c2, 2), Fraction(c1 - c2, 2))
        return ((c1 + c2) / 2, (c1 - c2) / 2)
    # (p, v)
    return (c2, c2 - c1)


def beta_vertex(mu: Measure):
    """Arrangement route: the objective z_i + sum w_j |z - x_j|_inf is
    piecewise affine with break lines {z2=0} and the vertical, horizontal
    and two diagonal lines through each atom. No arrangement cell contains
    a full line (each direction is crossed by another), so every cell is
    pointed and both minima are attained at pairwise intersections;
    intersections below H clamp to the z2=0 break line harmlessly (any
    point of H only ever over-estimates the min)."""
    points, weights = _atoms(mu)
    exact = all(_is_exact(c) for p in points for c in p)
    if exact:
        points = [(Fraction(a), Fraction(b)) for a, b in points]
    else:
        points = [(float(a), float(b)) for a, b in points]
        weights = [float(w) for w in weights]
    lines = [("h", points[0][0] * 0)]
    for a, b in points:
        lines += [("v", a), ("h", b), ("p", a - b), ("m", a + b)]
    best1 = best2 = None
    for i in range(len(lines)):
        k1, c1 = lines[i]
        for j in range(i + 1, len(lines)):
            z = _cross(k1, c1, *lines[j], exact)
            if z is None:
                continue
            z1, z2 = z
            if z2 < 0:
                z2 = z2 * 0
            w = z1 * 0
            for (a, b), wt in zip(points, weights):
                da = abs(z1 - a)
                db = abs(z2 - b)
                w += wt * (da if da > db else db)
            f1 = z1 + w
            f2 = z2 + w
            if best1 is None or f1 < best1:
                best1 = f1
            if best2 is None or f2 < best2:
                best2 = f2
    return (best1, best2)


def beta_H(mu: Measure, method: str = "lp"):
    """The contracting barycenter of a finitely supported measure on H."""
    if method == "lp":
        return beta_lp(mu)
    if method == "vertex":
        return beta_vertex(mu)
    raise ValueError(f"unknown method {method!r}")


def _sigma_eval(x, y, t):
    # weights stay exact rationals; beta_vertex floats them when the
    # coordinates are floats anyway
    t = Fraction(t)
    mu = measure(halfplane_space(), [(tuple(x), 1 - t), (tuple(y), t)])
    return beta_vertex(mu)


def _sigma_batch(P: np.ndarray, Q: np.ndarray, T: np.ndarray) -> np.ndarray:
    p0, p1 = P[:, 0], P[:, 1]
    q0, q1 = Q[:, 0], Q[:, 1]
    wq = np.asarray(T, dtype=float)
    wp = 1.0 - wq
    zero = np.zeros_like(p0)
    hs = (zero, p1, q1)
    vs = (p0, q0)
    ps = (p0 - p1, q0 - q1)
    ms = (p0 + p1, q0 + q1)
    z1s, z2s = [], []
    for ch in hs:
        for cv in vs:
            z1s.append(cv)
            z2s.append(ch)
        for cp in ps:
            z1s.append(cp + ch)
            z2s.append(ch)
        for cm in ms:
            z1s.append(cm - ch)
            z2s.append(ch)
    for cv in vs:
        for cp in ps:
            z1s.append(cv)
            z2s.append(cv - cp)
        for cm in ms:
            z1s.append(cv)
            z2s.append(cm - cv)
    for cp in ps:
        for cm in ms:
            z1s.append((cp + cm) / 2)
            z2s.append((cm - cp) / 2)
    Z1 = np.stack(z1s)
    Z2 = np.stack(z2s)
    np.maximum(Z2, 0.0, out=Z2)
    W = wp * np.maximum(np.abs(Z1 - p0), np.abs(Z2 - p1)) \
        + wq * np.maximum(np.abs(Z1 - q0), np.abs(Z2 - q1))
    F1 = Z1 + W
    F2 = Z2 + W
    return np.stack([F1.min(axis=0), F2.min(axis=0)], axis=1)


def sigma_H(grid: int = 120) -> Bicombing:
    """The tent bicombing: join x to y through the barycenters of their
    mixtures. Conical and reversible; its gap to the linear bicombing is
    what the distinctness certificate measures."""
    return Bicombing(halfplane_space(), "tent", _sigma_eval, grid=grid,
                     conical=True, reversible=True, batch_fn=_sigma_batch)


WITNESS_PAIR = ((Fraction(-1), Fraction(0)), (Fraction(1), Fraction(0)))


def distinctness_certificate(eps: float = 1e-9, k_max: int = 3,
                             pairs_per_level: int = 40, seed: int = 7) -> dict:
    """Certify that the tent and linear bicombings are distinct points of
    the moduli space: exact witness value, and a D_o lower bound >= 1."""
    from .handles import linear_bicombing
    from .moduli import d_o

    space = halfplane_space()
    x, y = WITNESS_PAIR
    mu = measure(space, [(x, Fraction(1, 2)), (y, Fraction(1, 2))])
    b = beta_lp(mu)
    b2 = beta_vertex(mu)
    lin_mid = (Fraction(0), Fraction(0))
    gap = max(abs(a - c) for a, c in zip(b, lin_mid))
    rep = d_o(sigma_H(), linear_bicombing(space), o=(0.0, 0.0), k_max=k_max,
              pairs_per_level=pairs_per_level, seed=seed,
              extra_pairs=[WITNESS_PAIR])
    return {
        "witness_pair": x + y,
        "beta_lp": b,
        "beta_vertex": b2,
        "expected": (Fraction(0), Fraction(1)),
        "midpoint_gap": gap,
        "d_o_lower_bound": rep.value,
        "distinct": float(rep.value) > eps,
    }


def interpolation_family(k: int, grid: int = 120) -> list:
    """k conical bicombings Phi(linear, tent, j/(k-1)); with the linear
    interpolator phi they are pairwise distinct at the standard witness."""
    from .handles import linear_bicombing
    from .moduli import interpolate

    if k < 2:
        raise ValueError("need k >= 2 family members")
    space = halfplane_space()
    lin = linear_bicombing(space)
    tent = sigma_H(grid)
    return [interpolate(lin, tent, Fraction(j, k - 1), phi=lin)
            for j in range(k)]
