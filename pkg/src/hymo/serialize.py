"""Deterministic text output for matrices, reports, and grid snapshots.

Numbers are rendered with repr (shortest round-trip form), so a given
config and seed always produce byte-identical files. Files are staged
completely in memory and moved into place atomically, so a failing
command never leaves a partial output behind.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

__all__ = [
    "fnum",
    "state_hash",
    "envelope_comments",
    "matrix_csv_section",
    "build_csv",
    "build_json",
    "grid_csv_text",
    "write_text",
]


def fnum(x):
    """Shortest exact decimal form of a float."""
    return repr(float(x))


def state_hash(json_dict):
    """Short content hash of a JSON-serializable state description."""
    canon = json.dumps(json_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def envelope_comments(envelope):
    """Comment header lines recording tool, version, and config echo."""
    lines = []
    for key, value in envelope.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True, separators=(",", ":"))
        lines.append(f"# {key}: {value}")
    return lines


def matrix_csv_section(name, matrix):
    """CSV lines for one named matrix or vector."""
    arr = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = [f"# matrix: {name}", f"# shape: {arr.shape[0]} {arr.shape[1]}"]
    for row in arr:
        lines.append(",".join(fnum(v) for v in row))
    return lines


def build_csv(envelope, sections):
    """Full CSV document: envelope comments then each (name, lines) section."""
    lines = envelope_comments(envelope)
    for section in sections:
        lines.extend(section)
    return "\n".join(lines) + "\n"


def build_json(envelope, result):
    doc = dict(envelope)
    doc["result"] = result
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def grid_csv_text(grid, t, envelope):
    """Snapshot CSV with columns x, rho, u, theta, f3..fM."""
    lines = envelope_comments(dict(envelope, time=fnum(t)))
    cols = ["x", "rho", "u", "theta"] + [f"f{a}" for a in range(3, grid.M + 1)]
    lines.append(",".join(cols))
    centers = grid.centers()
    for i in range(grid.n_cells):
        vals = [centers[i]] + list(grid.W[i])
        lines.append(",".join(fnum(v) for v in vals))
    return "\n".join(lines) + "\n"


def write_text(path, text):
    """Write text atomically: stage next to the target, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."),
                               prefix=path.name + ".", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
