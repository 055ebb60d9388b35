"""Helpers for storing numpy arrays inside frozen models."""

from typing import Any

import numpy as np


def readonly_array(value: Any, ndim: int, name: str = "array") -> np.ndarray:
    """Copy ``value`` into a float64 array of the given rank and lock it.

    Args:
        value: Array-like input
        ndim: Required number of dimensions
        name: Field name used in error messages

    Returns:
        Read-only float64 array

    Raises:
        ValueError: If the rank does not match
    """
    array = np.array(value, dtype=float, copy=True)
    if array.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {array.shape}")
    array.setflags(write=False)
    return array
