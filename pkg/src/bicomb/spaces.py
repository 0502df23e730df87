"""Ground spaces: finite metrics, sup-norm coordinate spaces, the closed
half-plane in the sup-norm plane, and tight spans of finite metrics.

Points are plain data: an index into the label list for finite spaces, a
tuple of coordinates for sup-norm spaces, and an object carrying a `values`
vector (sup metric) for tight spans.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .rationals import format_rational, parse_rational


class SpaceError(ValueError):
    pass


class SpaceMismatchError(SpaceError):
    pass


class MetricAxiomError(SpaceError):
    """A candidate distance matrix violates a metric axiom.

    axiom is one of: "shape", "nonzero_diagonal", "negative_entry",
    "asymmetry", "zero_distance", "triangle"; witness carries the offending
    indices.
    """

    def __init__(self, axiom: str, witness: tuple, message: str):
        super().__init__(message)
        self.axiom = axiom
        self.witness = witness


@dataclass(frozen=True)
class FiniteMetric:
    labels: tuple
    d: tuple  # tuple of tuples of Fractions

    @cached_property
    def fd(self) -> tuple:
        # float view of the matrix, for the numeric paths
        return tuple(tuple(float(v) for v in row) for row in self.d)

    @property
    def size(self) -> int:
        return len(self.labels)

    @cached_property
    def diameter(self) -> Fraction:
        return max((v for row in self.d for v in row), default=Fraction(0))

    def index_of(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise SpaceMismatchError(f"unknown point label {label!r}") from None

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "d": [[format_rational(v) for v in row] for row in self.d],
        }


def validate_metric(labels: Sequence, rows: Sequence[Sequence]) -> FiniteMetric:
    """Check all finite-metric axioms and return the validated matrix.

    Entries may be Fractions, ints, or strings like "3/7" / "0.25".
    """
    n = len(labels)
    if len(set(labels)) != n:
        raise MetricAxiomError("shape", (), "duplicate labels")
    if len(rows) != n or any(len(r) != n for r in rows):
        raise MetricAxiomError("shape", (n,), f"matrix must be {n}x{n}")
    d = [[parse_rational(v) for v in row] for row in rows]
    for i in range(n):
        if d[i][i] != 0:
            raise MetricAxiomError(
                "nonzero_diagonal", (i,), f"d[{i}][{i}] = {d[i][i]} != 0")
    for i in range(n):
        for j in range(n):
            if d[i][j] < 0:
                raise MetricAxiomError(
                    "negative_entry", (i, j), f"d[{i}][{j}] = {d[i][j]} < 0")
            if i != j and d[i][j] == 0:
                raise MetricAxiomError(
                    "zero_distance", (i, j), f"d[{i}][{j}] = 0 for distinct points")
            if d[i][j] != d[j][i]:
                raise MetricAxiomError(
                    "asymmetry", (i, j), f"d[{i}][{j}] != d[{j}][{i}]")
    for k in range(n):
        for i in range(n):
            dik = d[i][k]
            for j in range(n):
                if d[i][j] > dik + d[k][j]:
                    raise MetricAxiomError(
                        "triangle", (i, j, k),
                        f"d[{i}][{j}] > d[{i}][{k}] + d[{k}][{j}]")
    return FiniteMetric(tuple(labels), tuple(tuple(row) for row in d))


def metric_from_dict(doc: dict) -> FiniteMetric:
    try:
        labels = doc["labels"]
        rows = doc["d"]
    except (KeyError, TypeError) as exc:
        raise SpaceError("finite metric document needs 'labels' and 'd'") from exc
    return validate_metric(labels, rows)


@dataclass(frozen=True)
class Space:
    kind: str  # "finite" | "linf" | "halfplane" | "tightspan"
    metric: Optional[FiniteMetric] = None
    dim: Optional[int] = None

    def __repr__(self):
        if self.kind == "finite":
            return f"Space(finite, n={self.metric.size})"
        if self.kind == "tightspan":
            return f"Space(tightspan, n={self.metric.size})"
        return f"Space({self.kind}, dim={self.dim})"

    def to_dict(self) -> dict:
        doc = {"kind": self.kind}
        if self.metric is not None:
            doc.update(self.metric.to_dict())
        if self.dim is not None:
            doc["dim"] = self.dim
        return doc


def finite_space(fm: FiniteMetric) -> Space:
    return Space("finite", metric=fm)


def linf_space(dim: int) -> Space:
    if dim < 1:
        raise SpaceError("dimension must be positive")
    return Space("linf", dim=dim)


def halfplane_space() -> Space:
    # {(a, b) in linf^2 : b >= 0}
    return Space("halfplane", dim=2)


def tightspan_space(fm: FiniteMetric) -> Space:
    return Space("tightspan", metric=fm)


def _vec(p):
    v = getattr(p, "values", p)
    if isinstance(v, (tuple, list)):
        return v
    raise SpaceMismatchError(f"not a coordinate point: {p!r}")


def dist(space: Space, p, q):
    """Distance in `space`; exact Fraction on finite spaces, float otherwise
    (exact when both points carry exact coordinates)."""
    kind = space.kind
    if kind == "finite":
        if not isinstance(p, int) or not isinstance(q, int):
            raise SpaceMismatchError("finite-space points are indices")
        n = space.metric.size
        if not (0 <= p < n and 0 <= q < n):
            raise SpaceMismatchError(f"index out of range: {p}, {q}")
        return space.metric.d[p][q]
    if kind in ("linf", "halfplane"):
        if len(p) != space.dim or len(q) != space.dim:
            raise SpaceMismatchError("coordinate dimension mismatch")
        return max(abs(a - b) for a, b in zip(p, q))
    if kind == "tightspan":
        vp, vq = _vec(p), _vec(q)
        if len(vp) != len(vq) or len(vp) != space.metric.size:
            raise SpaceMismatchError("tight-span vector length mismatch")
        return max(abs(a - b) for a, b in zip(vp, vq))
    raise SpaceError(f"unknown space kind {kind!r}")


def contains(space: Space, p, tol: float = 1e-9) -> bool:
    kind = space.kind
    if kind == "finite":
        return isinstance(p, int) and 0 <= p < space.metric.size
    if kind == "linf":
        return len(p) == space.dim
    if kind == "halfplane":
        return len(p) == 2 and p[1] >= -tol
    if kind == "tightspan":
        from . import tightspan

        return tightspan.is_extremal(space, _vec(p), eps=max(tol, 1e-9))
    raise SpaceError(f"unknown space kind {kind!r}")


def point_key(p):
    """Hashable, orderable key for a point (used by caches and multisets)."""
    v = getattr(p, "values", p)
    if isinstance(v, list):
        return tuple(v)
    return v
