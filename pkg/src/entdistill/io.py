"""JSON interchange formats.

State files look like ``{"dims": [dA, dB], "data": [[re, im], ...]}`` with
entries in row-major order. Generic matrices use ``"shape"`` instead of
``"dims"``; Choi matrices add ``"in_dim"``/``"out_dim"``. Floats are written
with Python's shortest round-trip repr, so reading a file back is bit-exact.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .maps import OperatorMap
from .states import BipartiteState


def _encode_entries(m: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m, dtype=np.complex128).ravel()]


def _decode_entries(data, size: int) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.shape != (size, 2):
        raise ValueError(f"expected {size} [re, im] pairs, got array of shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def state_to_dict(s: BipartiteState) -> dict:
    return {"dims": [s.dim_a, s.dim_b], "data": _encode_entries(s.rho)}


def state_from_dict(d: dict) -> BipartiteState:
    da, db = (int(x) for x in d["dims"])
    n = da * db
    return BipartiteState(da, db, _decode_entries(d["data"], n * n).reshape(n, n))


def matrix_to_dict(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"shape": list(m.shape), "data": _encode_entries(m)}


def matrix_from_dict(d: dict) -> np.ndarray:
    r, c = (int(x) for x in d["shape"])
    return _decode_entries(d["data"], r * c).reshape(r, c)


def choi_to_dict(m: OperatorMap) -> dict:
    return {"in_dim": m.in_dim, "out_dim": m.out_dim, **matrix_to_dict(m.choi)}


def choi_from_dict(d: dict) -> OperatorMap:
    return OperatorMap(int(d["in_dim"]), int(d["out_dim"]), matrix_from_dict(d))


def dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False)


def write_text(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    Path(path).write_text(text)


def read_json(path: str | Path):
    if str(path) == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def save_state(s: BipartiteState, path: str | Path) -> None:
    write_text(dumps(state_to_dict(s)), path)


def load_state(path: str | Path) -> BipartiteState:
    return state_from_dict(read_json(path))
