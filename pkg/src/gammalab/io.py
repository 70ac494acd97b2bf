"""JSON files for matrices, tuples and symbol lists.

Complex entries are stored as ``[re, im]`` pairs. Python's ``json`` writes
floats with the shortest repr that round-trips, so write then read is
bit-exact.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ShapeError
from .fundamental import Gamma5Tuple, Gamma7Tuple, make_tuple

NAMES = {
    "gamma7": ["T1", "T2", "T3", "T4", "T5", "T6", "T7"],
    "gamma5": ["S1", "S2", "S3", "St1", "St2"],
}


def matrix_to_dict(A) -> dict:
    M = np.atleast_2d(np.asarray(A, dtype=complex))
    rows, cols = M.shape
    data = [[[float(z.real), float(z.imag)] for z in row] for row in M]
    return {"rows": rows, "cols": cols, "data": data}


def matrix_from_dict(obj: dict) -> np.ndarray:
    """Parse a matrix record, validating dimensions and finiteness."""
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"matrix record needs rows, cols and data: {exc}") from exc
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ShapeError(f"matrix data does not match {rows}x{cols}")
    out = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(data):
        for j, pair in enumerate(row):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ShapeError(f"entry ({i},{j}) is not an [re, im] pair")
            re, im = float(pair[0]), float(pair[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise ShapeError(f"entry ({i},{j}) is not finite")
            out[i, j] = complex(re, im)
    return out


def tuple_to_dict(t) -> dict:
    return {"variant": t.variant, "matrices": {k: matrix_to_dict(m) for k, m in zip(NAMES[t.variant], t.mats)}}


def tuple_from_dict(obj: dict):
    variant = obj.get("variant")
    if variant not in NAMES:
        raise ShapeError(f"unknown tuple variant {variant!r}")
    mats = obj.get("matrices")
    if isinstance(mats, dict):
        missing = [k for k in NAMES[variant] if k not in mats]
        if missing:
            raise ShapeError(f"tuple file is missing {', '.join(missing)}")
        parsed = [matrix_from_dict(mats[k]) for k in NAMES[variant]]
    elif isinstance(mats, list):
        parsed = [matrix_from_dict(m) for m in mats]
    else:
        raise ShapeError("tuple file needs a 'matrices' mapping")
    return make_tuple(variant, parsed)


def symbols_to_dict(mats: Sequence) -> dict:
    return {"matrices": [matrix_to_dict(m) for m in mats]}


def symbols_from_dict(obj) -> list:
    items = obj["matrices"] if isinstance(obj, dict) else obj
    if isinstance(items, dict):
        items = list(items.values())
    return [matrix_from_dict(m) for m in items]


def _load(path) -> object:
    with open(path) as fh:
        return json.load(fh)


def _save(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def read_matrix(path) -> np.ndarray:
    return matrix_from_dict(_load(path))


def write_matrix(A, path) -> None:
    _save(matrix_to_dict(A), path)


def read_tuple(path) -> Gamma7Tuple | Gamma5Tuple:
    return tuple_from_dict(_load(path))


def write_tuple(t, path) -> None:
    _save(tuple_to_dict(t), path)


def read_symbols(path) -> list:
    return symbols_from_dict(_load(path))


def write_symbols(mats: Sequence, path) -> None:
    _save(symbols_to_dict(mats), path)


def to_jsonable(obj):
    """Recursively convert numpy and complex values for ``json.dumps``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(np.stack([obj.real, obj.imag], axis=-1).tolist())
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj
