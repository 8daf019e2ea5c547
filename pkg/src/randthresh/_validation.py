"""Input validation helpers shared by the functional API and the estimators."""

import math
import numbers

import numpy as np

EPS_BOUNDARY = 1e-12
NORMALIZATION_TOL = 1e-9


def check_count(value, name):
    if isinstance(value, (bool, np.bool_)):
        raise TypeError(f"{name} must be an integer count, got bool")
    if isinstance(value, numbers.Integral):
        value = int(value)
    elif isinstance(value, numbers.Real) and float(value).is_integer():
        value = int(value)
    else:
        raise TypeError(f"{name} must be an integer count, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    if value >= 2**63:
        raise ValueError(f"{name} does not fit in a 64-bit count")
    return value


def check_open_probability(value, name):
    """Return ``value`` as float if it lies in (EPS, 1 - EPS), else raise ValueError."""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise TypeError(f"{name} must be a real number, got {value!r}") from None
    if not (EPS_BOUNDARY < value < 1.0 - EPS_BOUNDARY):
        raise ValueError(f"{name} must lie in the open interval (0, 1), got {value!r}")
    return value


def check_unit_interval(value, name, *, closed_low=True, closed_high=False):
    value = float(value)
    lo_ok = value >= 0.0 if closed_low else value > 0.0
    hi_ok = value <= 1.0 if closed_high else value < 1.0
    if not (lo_ok and hi_ok and math.isfinite(value)):
        lo = "[" if closed_low else "("
        hi = "]" if closed_high else ")"
        raise ValueError(f"{name} must lie in {lo}0, 1{hi}, got {value!r}")
    return value


def check_table_array(X):
    """Coerce a single table to a length-4 vector (n01, n11, n00, n10).

    Accepts a flat 4-vector or a 2x2 array laid out as the published tables:
    rows are outcome yes/no, columns are exposure no/yes.
    """
    arr = np.asarray(X)
    if arr.shape == (2, 2):
        arr = arr.reshape(4)
    if arr.shape != (4,):
        raise ValueError(f"expected a 2x2 table or 4 cells, got shape {arr.shape}")
    return arr


def check_seed(seed):
    if seed is None:
        raise ValueError("an explicit integer seed is required")
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, numbers.Integral):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not (0 <= seed < 2**64):
        raise ValueError("seed must be a non-negative 64-bit integer")
    return seed
