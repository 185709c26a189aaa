"""JSON and CSV formats shared by the library and the command line.

Matrix JSON::

    {"rows": 2, "cols": 2, "data": [[1, 0], [[0.0, 1.0], 0]]}

Entries are bare numbers (real) or ``[re, im]`` pairs (complex). Floats are
written with ``repr`` so 64-bit values round-trip exactly.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np


class FormatError(ValueError):
    """Input document does not follow the expected JSON/CSV layout."""


def _entry(x) -> complex:
    if isinstance(x, bool):
        raise FormatError("booleans are not matrix entries")
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if isinstance(x, list) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise FormatError(f"bad matrix entry {x!r}")


def matrix_from_json(doc: Any) -> np.ndarray:
    """Parse a matrix document; the result is real when no entry is complex."""
    if not isinstance(doc, dict) or not {"rows", "cols", "data"} <= doc.keys():
        raise FormatError('matrix JSON needs "rows", "cols" and "data"')
    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise FormatError("rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows:
        raise FormatError(f"data must hold {rows} rows")
    out = np.empty((rows, cols), dtype=complex)
    is_complex = False
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise FormatError(f"row {i} must hold {cols} entries")
        for j, x in enumerate(row):
            is_complex |= isinstance(x, list)
            out[i, j] = _entry(x)
    if not np.all(np.isfinite(out)):
        raise FormatError("matrix has non-finite entries")
    return out if is_complex else out.real.copy()


def _num(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("cannot serialise non-finite value")
    return x


def matrix_to_json(m) -> dict:
    a = np.asarray(m)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if np.iscomplexobj(a):
        data = [[[_num(z.real), _num(z.imag)] for z in row] for row in a]
    else:
        data = [[_num(x) for x in row] for row in a]
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "data": data}


def context_to_json(ctx) -> dict:
    return {
        "dim": ctx.dim,
        "label": ctx.label,
        "projectors": [matrix_to_json(p.matrix) for p in ctx.projectors],
    }


def context_from_json(doc: Any):
    from bornlab.csm import Context, Projector

    if not isinstance(doc, dict) or not {"dim", "projectors"} <= doc.keys():
        raise FormatError('context JSON needs "dim" and "projectors"')
    label = str(doc.get("label", ""))
    projectors = tuple(
        Projector(matrix_from_json(p).astype(complex), label=f"{label}[{i}]")
        for i, p in enumerate(doc["projectors"])
    )
    ctx = Context(projectors=projectors, label=label)
    if ctx.dim != doc["dim"]:
        raise FormatError(f"dim {doc['dim']} does not match projector size {ctx.dim}")
    return ctx


def context_map_to_json(cmap) -> dict:
    return {"unitary": matrix_to_json(cmap.unitary), "source": cmap.source, "target": cmap.target}


def context_map_from_json(doc: Any):
    from bornlab.csm import ContextMap

    if not isinstance(doc, dict) or "unitary" not in doc:
        raise FormatError('context map JSON needs "unitary"')
    return ContextMap(
        matrix_from_json(doc["unitary"]).astype(complex),
        source=str(doc.get("source", "")),
        target=str(doc.get("target", "")),
    )


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def matrix_to_csv(m) -> str:
    """Real matrix as CSV rows with 17 significant digits."""
    a = np.asarray(m, dtype=float)
    return "".join(",".join(format(x, ".17g") for x in row) + "\n" for row in a)


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [line.split(",") for line in text.strip().splitlines() if line.strip()]
    try:
        return np.array([[float(x) for x in row] for row in rows])
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
