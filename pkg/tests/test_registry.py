"""Dict/JSON spec parsing into spaces, points, measures, and bicombings."""
import json
from fractions import Fraction

import pytest

from bicomb.registry import (
    InputSpecError,
    build_bicombing,
    build_measure,
    build_space,
    default_bicombing,
    load_spec,
    parse_point,
)
from bicomb.spaces import dist
from bicomb.tightspan import ExtremalFunction

TRI = {"kind": "finite", "labels": ["a", "b", "c"],
       "d": [[0, 3, 4], [3, 0, 5], [4, 5, 0]]}


def test_load_spec_variants(tmp_path):
    assert load_spec({"kind": "linf"}) == {"kind": "linf"}
    assert load_spec('{"kind": "linf", "dim": 3}')["dim"] == 3
    p = tmp_path / "space.json"
    p.write_text(json.dumps(TRI))
    assert load_spec(str(p))["labels"] == ["a", "b", "c"]


@pytest.mark.parametrize("bad", [
    "/no/such/file.json",
    "{not json",
    '["a", "list"]',
])
def test_load_spec_rejects(bad):
    with pytest.raises(InputSpecError):
        load_spec(bad)


def test_build_space_kinds():
    assert build_space({"kind": "linf", "dim": 3}).dim == 3
    assert build_space({"kind": "halfplane"}).kind == "halfplane"
    fin = build_space(TRI)
    assert fin.kind == "finite" and fin.metric.labels == ("a", "b", "c")
    ts = build_space({"kind": "tightspan", "base": TRI})
    assert ts.kind == "tightspan" and ts.metric.size == 3


@pytest.mark.parametrize("bad", [
    {"kind": "sphere"},
    {},
    {"kind": "finite", "labels": ["a"], "d": [[0, 1], [1, 0]]},
    {"kind": "finite", "labels": ["a", "b"], "d": [[0, 9], [9, 0], []]},
    {"kind": "tightspan", "base": {"kind": "finite", "labels": ["a", "b"],
                                   "d": [[0, -1], [-1, 0]]}},
])
def test_build_space_rejects(bad):
    with pytest.raises(InputSpecError):
        build_space(bad)


def test_parse_point_by_space_kind(linf2, hp, tri3, ts3):
    from bicomb.spaces import finite_space

    fin = finite_space(tri3)
    assert parse_point(fin, "b") == 1
    with pytest.raises(InputSpecError):
        parse_point(fin, "z")

    assert parse_point(linf2, ["1/2", "0.25"]) == (Fraction(1, 2),
                                                   Fraction(1, 4))
    with pytest.raises(InputSpecError):
        parse_point(linf2, ["1/2"])  # wrong dimension
    with pytest.raises(InputSpecError):
        parse_point(hp, ["0", "-1"])  # below the boundary

    emb = parse_point(ts3, {"embed": "c"})
    assert isinstance(emb, ExtremalFunction)
    assert emb.values == (4.0, 5.0, 0.0)
    direct = parse_point(ts3, ["1", "2", "3"])  # the tripod center
    assert isinstance(direct, ExtremalFunction)
    with pytest.raises(InputSpecError, match="extremal"):
        parse_point(ts3, ["10", "10", "10"])
    with pytest.raises(InputSpecError):
        parse_point(ts3, ["1", "2"])  # wrong arity


def test_build_measure_inline_and_validated(linf2):
    mu = build_measure({
        "space": {"kind": "linf", "dim": 2},
        "atoms": [{"point": ["0", "0"], "weight": "1/3"},
                  {"point": ["1", "1"], "weight": "2/3"}],
    })
    assert mu.space.kind == "linf"
    assert sum(mu.weights) == 1
    with pytest.raises(InputSpecError):
        build_measure({"atoms": []}, linf2)
    with pytest.raises(InputSpecError):
        build_measure({"atoms": [{"point": ["0", "0"], "weight": "1/2"}]},
                      linf2)  # weights must sum to 1
    with pytest.raises(InputSpecError):
        build_measure({"atoms": [{"point": ["0"], "weight": "1"}]}, linf2)
    with pytest.raises(InputSpecError):
        build_measure({"atoms": [{"weight": "1"}]}, linf2)


def test_build_bicombing_constructions(linf2, hp, ts3):
    lin = build_bicombing({"construction": "linear"}, linf2)
    assert lin.name == "linear" and lin.linear

    tent = build_bicombing({"construction": "tent", "grid": 60})
    assert tent.space.kind == "halfplane" and tent.grid == 60

    ex = build_bicombing({"construction": "exhull"}, ts3)
    assert ex.space is ts3

    chain = build_bicombing(
        {"construction": "chain", "base": {"construction": "tent"}, "n": 3})
    assert chain.name.startswith("chain(")

    scale = build_bicombing(
        {"construction": "scale", "base": {"construction": "tent"}, "n": 4})
    assert scale.name.startswith("scale(")

    sub = build_bicombing(
        {"construction": "subdiv", "sigma": {"construction": "tent"},
         "tau": {"construction": "tent"}, "n": 2})
    assert sub.name.startswith("subdiv(")

    interp = build_bicombing(
        {"construction": "interp", "a": {"construction": "tent"},
         "b": {"construction": "tent"}, "t": "1/3"}, hp)
    assert "interp" in interp.name

    rev = build_bicombing(
        {"construction": "reversal", "tau": {"construction": "tent"},
         "base": {"construction": "tent"}}, hp)
    assert "rev" in rev.name

    multi = build_bicombing(
        {"construction": "reversal", "tau": {"construction": "tent"},
         "base": {"construction": "tent"}, "steps": 3}, hp)
    assert multi.space.kind == "halfplane"


def test_build_bicombing_grid_override_and_eval(hp):
    tent = build_bicombing({"construction": "tent"})
    coarse = build_bicombing(
        {"construction": "chain", "base": {"construction": "tent"},
         "n": 2, "grid": 12})
    assert coarse.grid == 12
    v = coarse((-1.0, 0.0), (1.0, 0.0), Fraction(1, 2))
    assert float(dist(hp, v, tent((-1.0, 0.0), (1.0, 0.0), Fraction(1, 2)))) <= 1e-7


@pytest.mark.parametrize("bad", [
    {"construction": "warp"},
    {"construction": "linear"},  # no space anywhere
    {"construction": "exhull", "space": {"kind": "linf"}},
    {"construction": "chain", "base": {"construction": "tent"}, "n": "x"},
    {"construction": "subdiv", "sigma": {"construction": "tent"},
     "tau": {"construction": "tent"}, "n": 7},  # grid not divisible
    {"construction": "interp", "a": {"construction": "tent"},
     "b": {"construction": "tent"}, "t": "3/2"},
])
def test_build_bicombing_rejects(bad):
    with pytest.raises(InputSpecError):
        build_bicombing(bad)


def test_default_bicombing(linf2, hp, ts3, tri3):
    from bicomb.spaces import finite_space

    assert default_bicombing(linf2).linear
    assert default_bicombing(hp).name == "tent"
    assert default_bicombing(ts3).name == "exhull"
    with pytest.raises(InputSpecError):
        default_bicombing(finite_space(tri3))
