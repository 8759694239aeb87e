"""Plain CSV reading and writing for matrices, vectors and result tables."""
from __future__ import annotations

import numpy as np

from .errors import InvalidEntry


def read_matrix_csv(path) -> np.ndarray:
    """Comma-separated rows, no header, one matrix row per line."""
    with open(path) as fh:
        rows = [line.strip() for line in fh if line.strip()]
    if not rows:
        raise InvalidEntry(f"{path}: empty file")
    try:
        parsed = [[float(x) for x in r.split(",")] for r in rows]
    except ValueError as e:
        raise InvalidEntry(f"{path}: {e}") from None
    if len({len(r) for r in parsed}) != 1:
        raise InvalidEntry(f"{path}: rows have differing lengths")
    return np.array(parsed, dtype=float)


def read_vector_csv(path) -> np.ndarray:
    return read_matrix_csv(path).ravel()


def write_matrix_csv(path, a):
    with open(path, "w") as fh:
        for row in np.atleast_2d(a):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def write_vector_csv(path, v):
    with open(path, "w") as fh:
        for x in np.atleast_1d(v):
            fh.write(repr(float(x)) + "\n")


def parse_vector(text) -> np.ndarray:
    """``"1,2.5,3"`` -> array([1., 2.5, 3.])."""
    try:
        return np.array([float(x) for x in str(text).split(",") if x.strip()], dtype=float)
    except ValueError as e:
        raise InvalidEntry(f"cannot parse vector {text!r}: {e}") from None
