"""Doss expectations: E_D[mu] = {z : d(z,w) <= W1(mu, delta_w) for all w}.

Membership is co-verifiable: a single witness w refutes it. The witness
search probes far points along coordinate axes (where sup-norm slack
collapses) plus random box samples.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .sampling import rng_from_seed, sample_point
from .spaces import Space, dist
from .wasserstein import Measure


def w1_to_dirac(mu: Measure, w):
    """W1(mu, delta_w) = sum_i mu_i d(x_i, w): the coupling is forced."""
    return sum(wt * dist(mu.space, p, w) for p, wt in zip(mu.support, mu.weights))


def doss_violation(mu: Measure, z, w) -> float:
    return float(dist(mu.space, z, w)) - float(w1_to_dirac(mu, w))


def doss_membership(mu: Measure, z, witnesses: Sequence, tol: float = 1e-9):
    """Check d(z,w) <= W1(mu, delta_w) against every supplied witness.

    Returns (ok, worst_witness, worst_violation); ok means no witness
    exceeds tol, which certifies membership only relative to the list.
    """
    worst, worst_w = float("-inf"), None
    for w in witnesses:
        v = doss_violation(mu, z, w)
        if v > worst:
            worst, worst_w = v, w
    if worst_w is None:
        return True, None, 0.0
    return worst <= tol, worst_w, worst


def doss_set_finite(mu: Measure) -> list:
    """Exhaustive Doss set on a finite ground space, exact arithmetic."""
    space = mu.space
    if space.kind != "finite":
        raise ValueError("exhaustive Doss sets need a finite space")
    n = space.metric.size
    out = []
    for z in range(n):
        if all(dist(space, z, w) <= w1_to_dirac(mu, w) for w in range(n)):
            out.append(z)
    return out


@dataclass
class WitnessSearchResult:
    witness: Optional[object]
    violation: float
    checked: int


def banach_witness_search(mu: Measure, z, seed: int = 0, budget: int = 200,
                          radius: float = 4.0, tol: float = 1e-9,
                          probe_scales=(10.0, 100.0, 1000.0)) -> WitnessSearchResult:
    """Look for w with d(z,w) > W1(mu, delta_w) + tol.

    Far probes first: on coordinate spaces, +-M e_i offsets from z and from
    the support make the sup norm affine, which exposes mean-type
    violations that nearby witnesses miss. Then random box samples.
    """
    space = mu.space
    candidates = []
    if space.kind in ("linf", "halfplane"):
        anchors = [tuple(float(c) for c in z)]
        anchors += [tuple(float(c) for c in p) for p in mu.support]
        for anchor in anchors:
            for i in range(space.dim):
                for M in probe_scales:
                    for sign in (1.0, -1.0):
                        w = list(anchor)
                        w[i] += sign * M
                        if space.kind == "halfplane" and w[1] < 0:
                            w[1] = 0.0
                        candidates.append(tuple(w))
    elif space.kind == "finite":
        candidates.extend(range(space.metric.size))
    rng = rng_from_seed(seed)
    checked = 0
    for w in candidates:
        checked += 1
        v = doss_violation(mu, z, w)
        if v > tol:
            return WitnessSearchResult(w, v, checked)
        if checked >= budget:
            return WitnessSearchResult(None, 0.0, checked)
    while checked < budget:
        w = sample_point(space, rng, radius)
        checked += 1
        v = doss_violation(mu, z, w)
        if v > tol:
            return WitnessSearchResult(w, v, checked)
    return WitnessSearchResult(None, 0.0, checked)
