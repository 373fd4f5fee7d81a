"""Shared input-validation helpers."""

from __future__ import annotations

import numpy as np


def as_square_matrix(m, name: str = "matrix", allow_complex: bool = False) -> np.ndarray:
    """Coerce to a 2-D square ndarray with finite entries."""
    arr = np.asarray(m)
    if not allow_complex and np.iscomplexobj(arr):
        raise ValueError(f"{name} must be real-valued")
    if not allow_complex:
        arr = arr.astype(float, copy=False)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_finite(arr: np.ndarray, name: str = "array") -> np.ndarray:
    arr = np.asarray(arr)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_alpha(alpha: float, allow_any: bool = False) -> float:
    """Fractional orders live in (0, 1]; an override admits other reals."""
    alpha = float(alpha)
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    if not allow_any and not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}; "
                         "pass allow_any_alpha=True to override")
    return alpha


def check_bandwidth(omega: int, n: int) -> int:
    omega = int(omega)
    if not 1 <= omega <= n:
        raise ValueError(f"bandwidth must lie in [1, {n}], got {omega}")
    return omega
