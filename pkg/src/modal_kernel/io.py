"""File formats and report serialization.

State files: {"dims": [d1, ...], "amplitudes": [[re, im], ...]} with
amplitudes in row-major composite order.  Observable files mirror the
layout: {"dim": d, "matrix": [[[re, im], ...], ...]}.  Reports are
emitted as single-line JSON with deterministic key order; complex
numbers always serialize as [re, im] pairs.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import ValidationError
from .hilbert import HermitianOperator, PureState, Subspace

__all__ = [
    "load_state",
    "save_state",
    "load_observable",
    "complex_pair",
    "vector_pairs",
    "matrix_pairs",
    "basis_pairs",
    "jsonable",
    "emit",
]


def _read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


def _pairs_to_complex(raw, what: str) -> np.ndarray:
    arr = np.array(raw, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValidationError(f"{what} must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def load_state(path: str, *, norm_tol: float | None = None) -> PureState:
    """Parse a state file, rejecting malformed or non-normalized input."""
    data = _read_json(path)
    if not isinstance(data, dict) or "dims" not in data or "amplitudes" not in data:
        raise ValidationError(
            f"{path}: a state file needs 'dims' and 'amplitudes' fields")
    dims = data["dims"]
    if (not isinstance(dims, list) or not dims
            or not all(isinstance(d, int) and d >= 1 for d in dims)):
        raise ValidationError(f"{path}: 'dims' must be a list of positive integers")
    amps = _pairs_to_complex(data["amplitudes"], f"{path}: 'amplitudes'")
    if amps.ndim != 1:
        raise ValidationError(f"{path}: 'amplitudes' must be a flat list of pairs")
    return PureState(dims, amps, norm_tol=norm_tol)


def save_state(path: str, state: PureState) -> None:
    payload = {"dims": list(state.dims),
               "amplitudes": vector_pairs(state.amplitudes)}
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(emit(payload))


def load_observable(path: str, *, herm_tol: float | None = None) -> HermitianOperator:
    """Parse an observable file holding one Hermitian complex matrix."""
    data = _read_json(path)
    if not isinstance(data, dict) or "matrix" not in data:
        raise ValidationError(f"{path}: an observable file needs a 'matrix' field")
    matrix = _pairs_to_complex(data["matrix"], f"{path}: 'matrix'")
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError(f"{path}: 'matrix' must be square")
    declared = data.get("dim")
    if declared is not None and declared != matrix.shape[0]:
        raise ValidationError(
            f"{path}: declared dim {declared} does not match matrix size "
            f"{matrix.shape[0]}")
    return HermitianOperator(matrix, herm_tol=herm_tol)


def complex_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def vector_pairs(vec: np.ndarray) -> list[list[float]]:
    return [complex_pair(z) for z in np.asarray(vec).reshape(-1)]


def matrix_pairs(mat: np.ndarray) -> list[list[list[float]]]:
    return [vector_pairs(row) for row in np.asarray(mat)]


def basis_pairs(subspace: Subspace) -> list[list[list[float]]]:
    """Basis columns of a subspace, one pair-encoded vector per column."""
    return [vector_pairs(subspace.basis[:, j]) for j in range(subspace.rank)]


def jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars, arrays, and complexes for JSON."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return complex_pair(complex(value))
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    return value


def emit(payload: Any) -> str:
    """Serialize a report as one line of JSON with a trailing newline.

    Key order is insertion order and floats use the shortest
    representation that round-trips 64-bit values exactly, so equal
    payloads always produce byte-identical output.
    """
    return json.dumps(jsonable(payload), separators=(",", ":"),
                      ensure_ascii=True, allow_nan=False) + "\n"
