"""Command-line front end.

Thin client over the HTTP service: every subcommand builds a request,
posts it (in-process ASGI by default, --server for a remote instance),
and renders the returned report document. Exit codes: 0 ok, 1 defect
above tolerance, 2 input error, 3 budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import httpx

from .registry import InputSpecError, load_spec
from .reports import EXIT_INPUT, EXIT_OK, canonical_json, write_csv, write_report

OUT_DIR_ENV = "BICOMB_OUT"


@dataclass
class RunConfig:
    """Run-level knobs shared by every subcommand."""
    eps: float = 1e-8
    samples: int = 200
    grid: int = 120
    seed: int = 0
    budget: int = 200
    n: Optional[int] = None
    out: Optional[str] = None

    def __post_init__(self):
        if self.eps <= 0 or self.samples <= 0 or self.grid <= 0 \
                or self.budget <= 0 or (self.n is not None and self.n <= 0):
            raise InputSpecError("config numerics must be positive")

    def payload(self) -> dict:
        doc = {"eps": self.eps, "samples": self.samples, "grid": self.grid,
               "seed": self.seed, "budget": self.budget}
        if self.n is not None:
            doc["n"] = self.n
        return doc


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--eps", type=float, default=1e-8,
                   help="tolerance for defect checks (default 1e-8)")
    p.add_argument("--samples", type=int, default=200,
                   help="sample count for sweeps (default 200)")
    p.add_argument("--grid", type=int, default=120,
                   help="parameter grid denominator m (default 120)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--budget", type=int, default=200,
                   help="iteration budget for solvers")
    p.add_argument("--n", type=int, default=None,
                   help="chain/scale parameter n")
    p.add_argument("--out", default=None,
                   help=f"report file (default: ${OUT_DIR_ENV}/<cmd>-report.json"
                        " when the variable is set, else stdout)")
    p.add_argument("--server", default=None,
                   help="URL of a running service; default runs in-process")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bicomb",
        description="Exact W1, tight spans, conical bicombings, and their "
                    "improvement/extension certificates.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("w1", help="Wasserstein-1 between two measures")
    p.add_argument("--space", help="space spec (JSON file or inline)")
    p.add_argument("--measure", action="append", required=True,
                   help="measure spec; give twice (mu, then nu)")
    _add_common(p)

    p = sub.add_parser("tightspan", help="injective hull certificates")
    p.add_argument("--space", required=True, help="finite metric spec")
    _add_common(p)

    p = sub.add_parser("barycenter", help="contracting barycenter of a measure")
    p.add_argument("--space", help="space spec")
    p.add_argument("--measure", action="append", required=True)
    p.add_argument("--bicombing", help="bicombing spec (default by space)")
    _add_common(p)

    p = sub.add_parser("halfplane-demo",
                       help="half-plane bicombing distinctness certificate")
    _add_common(p)

    p = sub.add_parser("doss", help="Doss expectation membership")
    p.add_argument("--space", help="space spec")
    p.add_argument("--measure", action="append", required=True)
    p.add_argument("--point", help="candidate point (JSON or label)")
    _add_common(p)

    p = sub.add_parser("certify", help="defect sweep for a bicombing")
    p.add_argument("--space", help="space spec (when the bicombing needs one)")
    p.add_argument("--bicombing", required=True)
    _add_common(p)

    p = sub.add_parser("improve", help="per-n bound curves (2/n and 1/(n+1))")
    p.add_argument("--space", help="space spec")
    p.add_argument("--bicombing", help="default: the half-plane bicombing")
    _add_common(p)

    p = sub.add_parser("extend",
                       help="extend a bicombing to the injective hull")
    p.add_argument("--space", required=True, help="finite metric spec")
    p.add_argument("--bicombing",
                   help="bicombing on the hull (default: hull bicombing)")
    _add_common(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8023)
    return ap


def _spec_arg(value):
    return None if value is None else load_spec(value)


def _point_arg(value):
    if value is None:
        return None
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value  # a bare label


def build_request(args) -> tuple:
    """(endpoint path, JSON body) for the parsed CLI arguments."""
    cfg = RunConfig(eps=args.eps, samples=args.samples, grid=args.grid,
                    seed=args.seed, budget=args.budget, n=args.n,
                    out=args.out)
    body = {"config": cfg.payload()}
    cmd = args.command
    if cmd == "w1":
        if len(args.measure) != 2:
            raise InputSpecError("w1 needs exactly two --measure arguments")
        body["space"] = _spec_arg(args.space)
        body["mu"] = load_spec(args.measure[0])
        body["nu"] = load_spec(args.measure[1])
    elif cmd == "tightspan":
        body["space"] = load_spec(args.space)
    elif cmd == "barycenter":
        if len(args.measure) != 1:
            raise InputSpecError("barycenter takes one --measure")
        body["space"] = _spec_arg(args.space)
        body["measure"] = load_spec(args.measure[0])
        body["bicombing"] = _spec_arg(args.bicombing)
    elif cmd == "halfplane-demo":
        pass
    elif cmd == "doss":
        if len(args.measure) != 1:
            raise InputSpecError("doss takes one --measure")
        body["space"] = _spec_arg(args.space)
        body["measure"] = load_spec(args.measure[0])
        body["point"] = _point_arg(args.point)
    elif cmd == "certify":
        body["space"] = _spec_arg(args.space)
        body["bicombing"] = load_spec(args.bicombing)
    elif cmd == "improve":
        body["space"] = _spec_arg(args.space)
        body["bicombing"] = _spec_arg(args.bicombing)
    else:  # extend
        body["space"] = load_spec(args.space)
        body["bicombing"] = _spec_arg(args.bicombing)
    return f"/v1/{cmd}", {k: v for k, v in body.items() if v is not None}


def _post(server: Optional[str], path: str, body: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return client.post(path, json=body)

    async def inprocess():
        from .service import create_app
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(transport=transport, timeout=600.0,
                                     base_url="http://bicomb.internal") as client:
            return await client.post(path, json=body)

    import asyncio
    return asyncio.run(inprocess())


def _summarize(doc: dict) -> list:
    cmd, res = doc["command"], doc["results"]
    lines = []
    if cmd == "w1" and "value" in res:
        exact = f" = {res['value_exact']}" if "value_exact" in res else ""
        lines.append(f"W1 = {res['value']:.12g}{exact}")
    elif cmd == "barycenter" and "value" in res:
        lines.append(f"barycenter = {json.dumps(res['value'])}")
    elif cmd == "halfplane-demo" and "certificate" in res:
        cert = res["certificate"]
        lines.append(f"midpoint beta = {json.dumps(cert.get('beta_lp'))} "
                     f"(expected {json.dumps(cert.get('expected'))})")
        lines.append(f"distinct from linear: {cert.get('distinct')} "
                     f"(D_o lower bound {cert.get('d_o_lower_bound')})")
    elif cmd == "doss":
        if res.get("exhaustive"):
            lines.append(f"Doss set = {res['doss_set']}")
        elif res.get("witness") is not None:
            lines.append(f"violating witness {json.dumps(res['witness'])} "
                         f"(violation {res['violation']:.3e})")
        else:
            lines.append(f"no violating witness among {res['checked']} probes")
    for rep in _walk_reports(res):
        verdict = "PASS" if (rep["tolerance"] is None
                             or rep["max_violation"] <= rep["tolerance"]) else "FAIL"
        tol = "-" if rep["tolerance"] is None else f"{rep['tolerance']:.2e}"
        lines.append(f"  {rep['property']:<20} max_violation="
                     f"{rep['max_violation']:.3e} tol={tol} {verdict}")
    lines.append(f"status: {doc['status']}")
    return lines


def _walk_reports(node):
    if isinstance(node, dict):
        if "max_violation" in node and "property" in node:
            yield node
        else:
            for v in node.values():
                yield from _walk_reports(v)
    elif isinstance(node, list):
        for v in node:
            yield from _walk_reports(v)


def _emit(doc: dict, out: Optional[str]) -> None:
    target = out
    if target is None and os.environ.get(OUT_DIR_ENV):
        target = str(Path(os.environ[OUT_DIR_ENV])
                     / f"{doc['command']}-report.json")
    if target:
        path = write_report(doc, target)
        if doc["command"] == "improve" and doc["results"].get("curve"):
            rows = [[r["n"], r["consistency_defect"], r["consistency_bound"],
                     r["cauchy_value"], r["cauchy_bound"]]
                    for r in doc["results"]["curve"]]
            write_csv(path.with_suffix(".csv"),
                      ["n", "consistency_defect", "consistency_bound",
                       "cauchy_value", "cauchy_bound"], rows)
        print(f"report: {path}")
    else:
        print(canonical_json(doc), end="")
    for line in _summarize(doc):
        print(line)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return EXIT_OK
    try:
        path, body = build_request(args)
    except InputSpecError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        resp = _post(args.server, path, body)
    except httpx.HTTPError as e:
        print(f"service unreachable: {e}", file=sys.stderr)
        return EXIT_INPUT
    if resp.status_code in (400, 422):
        detail = resp.json().get("detail", resp.text)
        print(f"input error: {detail}", file=sys.stderr)
        return EXIT_INPUT
    if resp.status_code != 200:
        print(f"service error {resp.status_code}: {resp.text}",
              file=sys.stderr)
        return EXIT_INPUT
    doc = resp.json()
    _emit(doc, args.out)
    return int(doc["exit_code"])


if __name__ == "__main__":
    sys.exit(main())
