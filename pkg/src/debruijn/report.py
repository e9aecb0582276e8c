"""Machine-readable run reports.

Every CLI invocation and experiment run produces a JSON document with a
fixed schema: what was run, with which parameters and seeds, digests of any
input files, and the results.  Serialisation is deterministic (sorted keys,
fixed layout), so re-running with the same inputs and seeds reproduces the
document byte for byte apart from the timestamp.
"""
from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__

SCHEMA = "debruijn.report/1"


def file_digest(path) -> str:
    digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    return f"sha256:{digest}"


def jsonable(value):
    """Coerce numpy containers and scalars into plain JSON values.

    Non-finite floats have no JSON spelling, so NaN and infinities map to
    None (estimates for words that were never visited, say).
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


def build_report(
    command: str,
    parameters: dict,
    results: dict,
    seed=None,
    input_paths=(),
) -> dict:
    return {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seed": jsonable(seed),
        "inputs": {
            "digests": {str(p): file_digest(p) for p in input_paths},
            "parameters": jsonable(parameters),
        },
        "results": jsonable(results),
    }


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_report(report: dict, path) -> Path:
    path = Path(path)
    path.write_text(report_to_json(report))
    return path


def format_cell(value) -> str:
    """Render a CSV cell; floats use shortest-roundtrip via repr."""
    value = jsonable(value)
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header, rows) -> Path:
    """Write a small results table; values go through :func:`format_cell`."""
    path = Path(path)
    lines = [",".join(str(h) for h in header)]
    lines.extend(",".join(format_cell(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path
