"""Input validation helpers shared by the estimators and data types.

These mirror the defensive checks sklearn's check_array performs, but stay
deliberately small: everything in this package is float64 numpy all the way
down, so the helpers normalize dtype/shape and fail loudly on NaN or Inf
instead of supporting sparse/dataframe inputs.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DataError


def as_float_array(x, name: str = "x") -> np.ndarray:
    """Coerce to a float64 ndarray, rejecting non-finite values."""
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} contains NaN or infinite values")
    return arr


def as_vector(x, name: str = "x", min_len: int = 1) -> np.ndarray:
    arr = as_float_array(x, name)
    if arr.ndim != 1:
        raise DataError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_len:
        raise DataError(f"{name} needs at least {min_len} observations, got {arr.shape[0]}")
    return arr


def as_matrix(x, name: str = "x", n_cols: int | None = None) -> np.ndarray:
    arr = as_float_array(x, name)
    if arr.ndim != 2:
        raise DataError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise DataError(f"{name} must have {n_cols} columns, got {arr.shape[1]}")
    return arr


def as_dates(x, name: str = "dates") -> np.ndarray:
    """Coerce to datetime64[D], requiring strictly increasing values."""
    arr = np.asarray(x, dtype="datetime64[D]")
    if arr.ndim != 1:
        raise DataError(f"{name} must be 1-dimensional")
    if arr.size > 1 and not np.all(arr[1:] > arr[:-1]):
        bad = int(np.argmin(arr[1:] > arr[:-1]))
        raise DataError(
            f"{name} must be strictly increasing; violation at position {bad + 1} "
            f"({arr[bad]} -> {arr[bad + 1]})"
        )
    return arr


def check_lengths(name_a: str, a, name_b: str, b) -> None:
    if len(a) != len(b):
        raise DataError(f"{name_a} and {name_b} differ in length: {len(a)} vs {len(b)}")


def check_spd_2x2(h, name: str = "h0", tol: float = 0.0) -> np.ndarray:
    """Validate a symmetric positive definite 2x2 matrix."""
    m = as_matrix(h, name)
    if m.shape != (2, 2):
        raise DataError(f"{name} must be 2x2, got {m.shape}")
    if abs(m[0, 1] - m[1, 0]) > 1e-12 * (1.0 + abs(m[0, 1])):
        raise DataError(f"{name} must be symmetric")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if m[0, 0] <= tol or det <= tol:
        raise DataError(f"{name} must be positive definite")
    return m
