"""Exact and floating-point arithmetic backend.

Exact quantities are stored as integer numpy arrays over one shared positive
denominator.  Integer arrays are ``int64`` while their magnitudes allow it and
are widened to Python-int ``object`` arrays otherwise, so no operation here
ever overflows silently.  Float arrays carry a denominator of 1.
"""
from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import reduce

import numpy as np

DEFAULT_TOL = 1e-9
TOL_ENV = "TDCUBE_TOL"

# int64 arithmetic stays below this bound; float64 integer arithmetic below 2**53
_I64_BOUND = 2**62
_F64_EXACT = 2**53


def default_tolerance() -> float:
    """Zero tolerance for float mode, overridable through ``TDCUBE_TOL``."""
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise ValueError(f"{TOL_ENV}={raw!r} is not a number") from None
    if not tol > 0:
        raise ValueError(f"{TOL_ENV} must be positive, got {tol}")
    return tol


def is_exact_array(a: np.ndarray) -> bool:
    return a.dtype.kind in "iuO"


def max_abs(a: np.ndarray):
    """Largest absolute entry (Python int for integer arrays, float otherwise)."""
    if a.size == 0:
        return 0
    m = np.max(np.abs(a))
    return float(m) if a.dtype.kind == "f" else int(m)


def widen(a: np.ndarray) -> np.ndarray:
    return a if a.dtype == object else a.astype(object)


def shrink(a: np.ndarray) -> np.ndarray:
    if a.dtype == object and max_abs(a) < _I64_BOUND:
        return a.astype(np.int64)
    return a


def as_int_array(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return shrink(np.vectorize(int, otypes=[object])(a)) if a.size else a.astype(np.int64)
    if a.dtype.kind == "b":
        return a.astype(np.int64)
    if a.dtype.kind not in "iu":
        raise TypeError(f"expected integer data, got {a.dtype}")
    return a.astype(np.int64, copy=False)


def iscale(a: np.ndarray, c: int) -> np.ndarray:
    c = int(c)
    if c == 1:
        return a
    if a.dtype != object and max_abs(a) * abs(c) < _I64_BOUND:
        return a * c
    return shrink(widen(a) * c)


def ilincomb(ca: int, a: np.ndarray, cb: int, b: np.ndarray) -> np.ndarray:
    """Exact ``ca*a + cb*b`` for integer arrays (broadcasting allowed)."""
    ca, cb = int(ca), int(cb)
    if (
        a.dtype != object
        and b.dtype != object
        and max_abs(a) * abs(ca) + max_abs(b) * abs(cb) < _I64_BOUND
    ):
        return ca * a + cb * b
    return shrink(widen(a) * ca + widen(b) * cb)


def imul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact elementwise product of integer arrays."""
    if a.dtype != object and b.dtype != object and max_abs(a) * max_abs(b) < _I64_BOUND:
        return a * b
    return shrink(widen(a) * widen(b))


def idot(a: np.ndarray, b: np.ndarray) -> int:
    """Exact inner product of two integer arrays of equal size."""
    a, b = a.ravel(), b.ravel()
    if a.dtype != object and b.dtype != object:
        if max_abs(a) * max_abs(b) * max(a.size, 1) < _I64_BOUND:
            return int(np.dot(a, b))
    return int(np.dot(widen(a), widen(b)))


def igcd(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype != object:
        return int(np.gcd.reduce(a.ravel()))
    return reduce(math.gcd, (int(v) for v in a.flat), 0)


def matmul_axis(a: np.ndarray, m: np.ndarray, axis: int) -> np.ndarray:
    """Contract the square matrix ``m`` along ``axis`` of ``a``.

    ``out[..., x, ...] = sum_y m[x, y] * a[..., y, ...]``.  For integer inputs
    the result is exact: float64 BLAS is used when every partial sum is
    provably below 2**53, int64 when below 2**62, Python ints beyond that.
    """
    b = np.moveaxis(a, axis, -1)
    if a.dtype.kind == "f" or m.dtype.kind == "f":
        out = b @ np.asarray(m, dtype=float).T
    else:
        row = np.abs(m).sum(axis=1)
        bound = max_abs(a) * (int(row.max()) if row.size else 0)
        if a.dtype != object and m.dtype != object and bound < _F64_EXACT:
            out = np.rint(b.astype(float) @ m.T.astype(float)).astype(np.int64)
        elif a.dtype != object and m.dtype != object and bound < _I64_BOUND:
            out = b @ m.T
        else:
            out = shrink(widen(b) @ widen(m).T)
    return np.moveaxis(out, -1, axis)


def common_denominator(values) -> int:
    return reduce(lambda x, y: x * y // math.gcd(x, y), (Fraction(v).denominator for v in values), 1)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    raise TypeError(f"cannot use {x!r} as an exact scalar")


def fraction_array(num: np.ndarray, den: int) -> np.ndarray:
    out = np.empty(num.shape, dtype=object)
    flat = out.reshape(-1)
    for k, v in enumerate(num.ravel()):
        flat[k] = Fraction(int(v), den)
    return out


def is_zero(x, tol: float = DEFAULT_TOL, scale: float = 1.0) -> bool:
    """Zero test: exact for rationals, ``|x| <= tol*scale`` for floats."""
    if isinstance(x, (Fraction, int, np.integer)):
        return x == 0
    return abs(x) <= tol * (scale if scale > 0 else 1.0)


def render(x) -> str | float:
    """Exact values render as ``"p"`` or ``"p/q"``; floats stay floats."""
    if isinstance(x, (Fraction, int, np.integer)):
        return str(Fraction(x))
    return float(x)
