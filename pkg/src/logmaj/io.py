"""Matrix files and JSON report serialization.

A matrix file is a JSON object ``{"dim": m, "re": [[...]], "im": [[...]]}``
in row-major order; ``"im"`` may be omitted.  A file may also hold a JSON
list of such objects.  Writers use 17 significant digits so values
round-trip exactly.
"""

from __future__ import annotations

import json
import math
from enum import Enum
from pathlib import Path

import numpy as np


def matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValueError("matrix object needs a 're' field")
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.ndim != 2 or re.shape[0] != re.shape[1] or im.shape != re.shape:
        raise ValueError(f"matrix must be square, got shape {re.shape}")
    if "dim" in obj and int(obj["dim"]) != re.shape[0]:
        raise ValueError(f"dim {obj['dim']} does not match {re.shape[0]} rows")
    return re + 1j * im


def read_matrices(path) -> list:
    """Matrices stored in ``path`` (one object or a list of objects)."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, list):
        return [matrix_from_obj(d) for d in data]
    return [matrix_from_obj(data)]


def read_matrix(path) -> np.ndarray:
    mats = read_matrices(path)
    if len(mats) != 1:
        raise ValueError(f"{path} holds {len(mats)} matrices, expected one")
    return mats[0]


def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("matrix entries must be finite")
    return f"{x:.17g}"


def _rows(M) -> str:
    return "[" + ", ".join("[" + ", ".join(_num(x) for x in row) + "]" for row in M) + "]"


def matrix_to_json(A) -> str:
    A = np.asarray(A, dtype=complex)
    return f'{{"dim": {A.shape[0]}, "re": {_rows(A.real)}, "im": {_rows(A.imag)}}}'


def write_matrices(path, mats) -> None:
    mats = list(mats)
    body = matrix_to_json(mats[0]) if len(mats) == 1 else "[" + ",\n ".join(map(matrix_to_json, mats)) + "]"
    Path(path).write_text(body + "\n")


def jsonable(obj):
    """Convert numpy values, non-finite floats and report objects for :func:`json.dumps`."""
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if np.all(obj.imag == 0):
                return jsonable(obj.real.tolist())
            return {"re": jsonable(obj.real.tolist()), "im": jsonable(obj.imag.tolist())}
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "+inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(obj, complex):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    return obj


def dumps(obj, indent=None) -> str:
    return json.dumps(jsonable(obj), indent=indent, allow_nan=False)
