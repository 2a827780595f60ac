"""Input validation helpers shared by the graph types and solvers."""

from __future__ import annotations

import numpy as np

__all__ = [
    "check_matrix",
    "check_probability_vector",
    "check_symmetric",
    "as_readonly",
]


def check_matrix(values, name: str = "array", ndim: int = 2) -> np.ndarray:
    """Coerce to a float ndarray of the given rank with finite entries."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_probability_vector(mu, name: str = "mu", tol: float = 1e-9) -> np.ndarray:
    """Validate a node measure: nonnegative entries summing to 1 within ``tol``.

    The vector is renormalized when the sum deviates by at most ``tol``
    (dataset files carry limited precision); larger deviations are rejected.
    """
    vec = check_matrix(mu, name, ndim=1)
    if vec.size == 0:
        raise ValueError(f"{name} must have at least one entry")
    if np.any(vec < 0):
        raise ValueError(f"{name} has negative entries")
    total = float(vec.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"{name} sums to {total!r}, outside tolerance {tol}")
    if total != 1.0:
        vec = vec / total
    return vec


def check_symmetric(values, name: str = "structure") -> np.ndarray:
    """Validate an exactly symmetric square matrix."""
    arr = check_matrix(values, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if arr.size and not np.array_equal(arr, arr.T):
        raise ValueError(f"{name} is not symmetric")
    return arr


def as_readonly(arr: np.ndarray) -> np.ndarray:
    """Return a copy with the writeable flag cleared (safe to share)."""
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out
