"""Construction registry: turn plain-dict specs (inline JSON or files)
into spaces, points, measures, and bicombings. All schema problems raise
InputSpecError, which the front ends map to the input-error exit code."""
from __future__ import annotations

import json
from pathlib import Path

from .barycenter import BarycenterError
from .chains import s_n, sigma_n, subdivide
from .halfplane import sigma_H
from .handles import Bicombing, GridError, linear_bicombing
from .moduli import interpolate, iterate_reversal, reversal_step
from .rationals import NumberFormatError, parse_rational
from .spaces import (Space, SpaceError, finite_space, halfplane_space,
                     linf_space, metric_from_dict)
from .tightspan import ExtremalFunction, ex_bicombing, is_extremal, make_tightspan, star_residual
from .wasserstein import Measure, MeasureError, measure

INPUT_ERRORS = (SpaceError, MeasureError, NumberFormatError, GridError,
                BarycenterError, KeyError, TypeError, ValueError)


class InputSpecError(ValueError):
    pass


def load_spec(source) -> dict:
    """Inline JSON (starts with '{') or a path to a JSON file."""
    if isinstance(source, dict):
        return source
    text = str(source).strip()
    if not text.startswith("{"):
        p = Path(text)
        if not p.is_file():
            raise InputSpecError(f"no such spec file: {text}")
        text = p.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputSpecError(f"invalid JSON spec: {e}") from e
    if not isinstance(doc, dict):
        raise InputSpecError("spec must be a JSON object")
    return doc


def build_space(spec) -> Space:
    spec = load_spec(spec)
    kind = spec.get("kind")
    try:
        if kind == "linf":
            return linf_space(int(spec.get("dim", 2)))
        if kind == "halfplane":
            return halfplane_space()
        if kind == "finite":
            return finite_space(metric_from_dict(spec))
        if kind == "tightspan":
            return make_tightspan(metric_from_dict(load_spec(spec["base"])))
    except INPUT_ERRORS as e:
        raise InputSpecError(f"bad space spec: {e}") from e
    raise InputSpecError(f"unknown space kind {kind!r}")


def parse_point(space: Space, raw, eps: float = 1e-6):
    try:
        if space.kind == "finite":
            return space.metric.index_of(raw)
        if space.kind in ("linf", "halfplane"):
            pt = tuple(parse_rational(v) for v in raw)
            if len(pt) != space.dim:
                raise InputSpecError(f"point needs {space.dim} coordinates")
            if space.kind == "halfplane" and pt[1] < 0:
                raise InputSpecError("half-plane points need second "
                                     "coordinate >= 0")
            return pt
        if space.kind == "tightspan":
            if isinstance(raw, dict) and "embed" in raw:
                from .tightspan import embed
                return embed(space, space.metric.index_of(raw["embed"]))
            vals = tuple(float(parse_rational(v)) for v in raw)
            if len(vals) != space.metric.size:
                raise InputSpecError(
                    f"hull point needs {space.metric.size} values")
            if not is_extremal(space, vals, eps):
                raise InputSpecError(
                    f"point is not extremal within {eps:.1e} "
                    f"(residual {star_residual(space, vals):.3e})")
            return ExtremalFunction(space, vals, star_residual(space, vals))
    except InputSpecError:
        raise
    except INPUT_ERRORS as e:
        raise InputSpecError(f"bad point {raw!r}: {e}") from e
    raise InputSpecError(f"no point parser for space kind {space.kind!r}")


def build_measure(spec, space: Space = None) -> Measure:
    spec = load_spec(spec)
    if space is None:
        if "space" not in spec:
            raise InputSpecError("measure spec needs a space")
        space = build_space(spec["space"])
    atoms_spec = spec.get("atoms")
    if not atoms_spec:
        raise InputSpecError("measure spec needs a nonempty 'atoms' list")
    atoms = []
    for a in atoms_spec:
        try:
            atoms.append((parse_point(space, a["point"]),
                          parse_rational(a["weight"])))
        except INPUT_ERRORS as e:
            raise InputSpecError(f"bad atom {a!r}: {e}") from e
    try:
        return measure(space, atoms)
    except MeasureError as e:
        raise InputSpecError(str(e)) from e


def build_bicombing(spec, space: Space = None) -> Bicombing:
    spec = load_spec(spec)
    kind = spec.get("construction")
    grid = spec.get("grid")
    try:
        if kind == "linear":
            sp = build_space(spec["space"]) if "space" in spec else space
            if sp is None:
                raise InputSpecError("linear construction needs a space")
            out = linear_bicombing(sp)
        elif kind == "tent":
            out = sigma_H(grid or 120)
        elif kind == "exhull":
            sp = build_space(spec["space"]) if "space" in spec else space
            if sp is None or sp.kind != "tightspan":
                raise InputSpecError("exhull construction needs a "
                                     "tightspan space")
            out = ex_bicombing(sp)
        elif kind == "chain":
            out = sigma_n(build_bicombing(spec["base"], space),
                          int(spec["n"]), float(spec.get("eps", 1e-8)))
        elif kind == "scale":
            out = s_n(build_bicombing(spec["base"], space),
                      int(spec["n"]), float(spec.get("eps", 1e-8)))
        elif kind == "subdiv":
            out = subdivide(build_bicombing(spec["sigma"], space),
                            build_bicombing(spec["tau"], space),
                            int(spec["n"]))
        elif kind == "interp":
            a = build_bicombing(spec["a"], space)
            b = build_bicombing(spec["b"], space)
            out = interpolate(a, b, parse_rational(spec.get("t", "1/2")))
        elif kind == "reversal":
            tau = build_bicombing(spec["tau"], space)
            base = build_bicombing(spec.get("base", spec["tau"]), space)
            steps = int(spec.get("steps", 1))
            if steps == 1:
                out = reversal_step(tau, base)
            else:
                out = iterate_reversal(tau, base, budget=steps).handle
        else:
            raise InputSpecError(f"unknown construction {kind!r}")
    except InputSpecError:
        raise
    except INPUT_ERRORS as e:
        raise InputSpecError(f"bad bicombing spec: {e}") from e
    if grid and kind != "tent":
        out.grid = int(grid)
    return out


def default_bicombing(space: Space) -> Bicombing:
    if space.kind == "tightspan":
        return ex_bicombing(space)
    if space.kind == "halfplane":
        return sigma_H()
    if space.kind == "linf":
        return linear_bicombing(space)
    raise InputSpecError(f"no default bicombing on a {space.kind!r} space; "
                         "pass --bicombing")
