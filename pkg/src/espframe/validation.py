"""Input validation helpers.

Most of the package operates on complex arrays, which scikit-learn's
``check_array`` rejects for the majority of estimators, so the handful of
checks needed here are written out directly.
"""

import numbers

import numpy as np

__all__ = [
    "as_complex_vector",
    "as_coeff_array",
    "as_weight_field",
    "check_index",
    "check_positive",
]


def as_complex_vector(x, n=None, dtype=None, name="signal"):
    """Coerce ``x`` to a finite 1-D complex ndarray.

    Objects carrying a ``samples`` attribute (the Signal container) are
    unwrapped, so operators accept either form.

    Parameters
    ----------
    x : array-like or object with ``.samples``
    n : int, optional
        Required length.
    dtype : numpy dtype, optional
        Target complex dtype. Defaults to complex128, except that complex64
        input is kept as is.
    name : str
        Used in error messages.
    """
    arr = np.asarray(getattr(x, "samples", x))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if dtype is None:
        dtype = arr.dtype if arr.dtype == np.complex64 else np.complex128
    arr = np.ascontiguousarray(arr, dtype=dtype)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if n is not None and arr.size != n:
        raise ValueError(f"{name} has length {arr.size}, expected {n}")
    return arr


def as_coeff_array(c, shape=None, name="coefficients"):
    """Coerce to a complex coefficient array, optionally checking its shape."""
    arr = np.asarray(c)
    if not np.issubdtype(arr.dtype, np.complexfloating):
        arr = arr.astype(np.complex128)
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_weight_field(lam, shape, name="lambda"):
    """Validate a penalty weight: positive scalar, or positive array
    broadcastable to the coefficient shape. Returns a float or float ndarray."""
    if np.isscalar(lam) or np.ndim(lam) == 0:
        value = float(np.real(lam))
        if not np.isfinite(value) or value <= 0:
            raise ValueError(f"{name} must be a positive finite scalar")
        return value
    arr = np.asarray(lam, dtype=np.float64)
    try:
        np.broadcast_shapes(arr.shape, tuple(shape))
    except ValueError:
        raise ValueError(
            f"{name} field shape {arr.shape} does not broadcast to {tuple(shape)}"
        ) from None
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ValueError(f"{name} field must be positive and finite everywhere")
    return arr


def check_positive(value, name, allow_zero=False):
    """Require a positive (or non-negative) real scalar; returns it as float."""
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    value = float(value)
    if value < 0 or (value == 0 and not allow_zero):
        bound = "non-negative" if allow_zero else "positive"
        raise ValueError(f"{name} must be {bound}, got {value}")
    return value


def check_index(value, bound, name):
    """Require an integer index in [0, bound)."""
    if not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if not 0 <= value < bound:
        raise IndexError(f"{name}={value} out of range [0, {bound})")
    return value
