"""Structured run reports: one self-describing JSON document per run with
the config echoed, every defect witness included, and byte-identical
serialization for fixed seed and config (no timestamps, sorted keys)."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional

from .handles import jsonable

EXIT_OK = 0
EXIT_DEFECT = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

STATUS_FOR_EXIT = {EXIT_OK: "ok", EXIT_DEFECT: "defect",
                   EXIT_INPUT: "input-error", EXIT_BUDGET: "budget-exhausted"}


def report_document(command: str, config: dict, results,
                    exit_code: int = EXIT_OK, notes: Optional[list] = None) -> dict:
    return {
        "command": command,
        "status": STATUS_FOR_EXIT[exit_code],
        "exit_code": exit_code,
        "config": jsonable(config),
        "results": jsonable(results),
        "notes": list(notes or []),
    }


def defect_exit(reports) -> int:
    """EXIT_DEFECT when any report in a list (or nested dict of lists)
    exceeds its tolerance."""
    def walk(node):
        if isinstance(node, dict):
            if "max_violation" in node and "tolerance" in node:
                yield node
            else:
                for v in node.values():
                    yield from walk(v)
        elif isinstance(node, (list, tuple)):
            for v in node:
                yield from walk(v)

    for rep in walk(jsonable(reports)):
        tol = rep["tolerance"]
        if tol is not None and rep["max_violation"] > tol:
            return EXIT_DEFECT
    return EXIT_OK


def canonical_json(doc) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2,
                      separators=(",", ": "), ensure_ascii=True) + "\n"


def write_report(doc: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(doc))
    return path


def write_csv(path, header, rows) -> Path:
    """Plot-ready CSV (per-n bound curves and the like)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([json.dumps(jsonable(v)) if isinstance(v, (dict, list))
                             else jsonable(v) for v in row])
    return path
