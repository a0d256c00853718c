"""Matrix-free action of the six generators and their idempotents on V⊗3.

A vector of V⊗3 is an (n, n, n) array indexed by vertex triples, so the flat
index of (x, y, z) is x*n^2 + y*n + z.  Operators act on the trailing three
axes of an array, which lets callers push a whole batch of vectors through
one call.

In exact mode arrays hold integers over a shared denominator and each
primitive operation reports the factor by which it multiplies that
denominator: 1 for A and E*, the common denominator of the dual eigenvalues
for A*, and the reduced denominator of E_i for E.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import scalar

__all__ = [
    "TensorVector",
    "OperatorHandle",
    "KINDS",
    "apply_raw",
    "apply_A",
    "apply_Astar",
    "apply_E",
    "apply_Estar",
    "inner_product",
    "self_adjointness_probe",
    "generators",
]

KINDS = ("A", "Astar", "E", "Estar")
SCHEMA_TAG = "tdcube.tensor3/1"


class TensorVector:
    """An element of V⊗3, stored densely as ``num / den``.

    In float mode ``num`` is a float array and ``den`` is 1.  Two vectors are
    equal when their entries are equal (exactly, whatever the denominators).
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = np.asarray(num)
        if num.ndim != 3 or len(set(num.shape)) != 1:
            raise ValueError(f"expected an (n, n, n) array, got shape {num.shape}")
        den = int(den)
        if den <= 0:
            raise ValueError("denominator must be positive")
        if num.dtype.kind == "f":
            if den != 1:
                raise ValueError("float vectors carry denominator 1")
        else:
            num = scalar.as_int_array(num)
        self.num = num
        self.den = den

    # construction

    @classmethod
    def zeros(cls, n: int, exact: bool = True) -> "TensorVector":
        return cls(np.zeros((n,) * 3, dtype=np.int64 if exact else float))

    @classmethod
    def ones(cls, n: int, exact: bool = True) -> "TensorVector":
        return cls(np.ones((n,) * 3, dtype=np.int64 if exact else float))

    @classmethod
    def basis(cls, n: int, triple, exact: bool = True) -> "TensorVector":
        v = cls.zeros(n, exact)
        v.num[tuple(triple)] = 1
        return v

    @classmethod
    def from_values(cls, values) -> "TensorVector":
        """Build from an array of Fractions/ints (exact) or floats."""
        values = np.asarray(values)
        if values.dtype.kind == "f":
            return cls(values)
        L = scalar.common_denominator(values.ravel())
        num = np.vectorize(lambda x: int(Fraction(x) * L), otypes=[object])(values)
        return cls(scalar.shrink(num), L).reduced()

    # basic properties

    @property
    def n(self) -> int:
        return self.num.shape[0]

    @property
    def exact(self) -> bool:
        return self.num.dtype.kind != "f"

    @property
    def representation(self) -> str:
        return "dense"

    def values(self) -> np.ndarray:
        return scalar.fraction_array(self.num, self.den) if self.exact else self.num

    def entry(self, x, y, z):
        v = self.num[x, y, z]
        return Fraction(int(v), self.den) if self.exact else float(v)

    def reduced(self) -> "TensorVector":
        if not self.exact:
            return self
        g = gcd(scalar.igcd(self.num), self.den)
        if g <= 1:
            return self
        return TensorVector(self.num // g, self.den // g)

    def is_zero(self, tol: float | None = None, scale: float = 1.0) -> bool:
        if self.exact:
            return not np.any(self.num)
        tol = scalar.default_tolerance() if tol is None else tol
        return scalar.max_abs(self.num) <= tol * scale

    def support_size(self) -> int:
        return int(np.count_nonzero(self.num))

    # arithmetic

    def _check(self, other):
        if not isinstance(other, TensorVector):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: n={self.n} vs n={other.n}")
        if other.exact != self.exact:
            raise ValueError("cannot mix exact and float vectors")
        return None

    def __add__(self, other):
        bad = self._check(other)
        if bad is not None:
            return bad
        if not self.exact:
            return TensorVector(self.num + other.num)
        L = self.den * other.den // gcd(self.den, other.den)
        return TensorVector(scalar.ilincomb(L // self.den, self.num, L // other.den, other.num), L).reduced()

    def __neg__(self):
        return TensorVector(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if self.exact:
            c = scalar.to_fraction(c)
            return TensorVector(scalar.iscale(self.num, c.numerator), self.den * c.denominator).reduced()
        return TensorVector(self.num * float(c))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TensorVector):
            return NotImplemented
        if other.n != self.n or other.exact != self.exact:
            return False
        if self.exact:
            return np.array_equal(scalar.iscale(self.num, other.den), scalar.iscale(other.num, self.den))
        return np.array_equal(self.num, other.num)

    __hash__ = None

    def allclose(self, other, tol: float | None = None) -> bool:
        tol = scalar.default_tolerance() if tol is None else tol
        diff = self - other
        scale = max(_float_max(self), _float_max(other), 1e-300)
        return _float_max(diff) <= tol * scale

    def norm_sq(self):
        return inner_product(self, self)

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"TensorVector(n={self.n}, {mode}, nnz={self.support_size()})"

    # serialization

    def to_sparse(self) -> dict:
        flat = self.num.ravel()
        idx = np.flatnonzero(flat)
        if self.exact:
            return {int(k): Fraction(int(flat[k]), self.den) for k in idx}
        return {int(k): float(flat[k]) for k in idx}

    @classmethod
    def from_sparse(cls, n: int, entries: dict, exact: bool = True) -> "TensorVector":
        size = n**3
        if exact:
            L = scalar.common_denominator(entries.values())
            num = np.zeros(size, dtype=object)
            for k, v in entries.items():
                if not 0 <= int(k) < size:
                    raise IndexError(f"flat index {k} outside 0..{size - 1}")
                num[int(k)] = int(Fraction(v) * L)
            return cls(scalar.shrink(num).reshape((n,) * 3), L).reduced()
        num = np.zeros(size)
        for k, v in entries.items():
            if not 0 <= int(k) < size:
                raise IndexError(f"flat index {k} outside 0..{size - 1}")
            num[int(k)] = float(v)
        return cls(num.reshape((n,) * 3))

    def to_json(self, representation: str = "sparse") -> dict:
        """Header with n and mode, then either (flat_index, value) pairs or the flat value list."""
        mode = "exact" if self.exact else "float"
        head = {"format": SCHEMA_TAG, "n": self.n, "mode": mode, "representation": representation}
        r = scalar.render
        if representation == "sparse":
            head["entries"] = [[k, r(v)] for k, v in sorted(self.to_sparse().items())]
        elif representation == "dense":
            head["values"] = [r(v) for v in self.values().ravel()]
        else:
            raise ValueError(f"unknown representation {representation!r}")
        return head

    @classmethod
    def from_json(cls, doc: dict) -> "TensorVector":
        n, exact = int(doc["n"]), doc["mode"] == "exact"
        conv = Fraction if exact else float
        if doc["representation"] == "sparse":
            return cls.from_sparse(n, {int(k): conv(v) for k, v in doc["entries"]}, exact)
        vals = doc["values"]
        if len(vals) != n**3:
            raise ValueError(f"expected {n**3} values, got {len(vals)}")
        return cls.from_sparse(n, {k: conv(v) for k, v in enumerate(vals) if conv(v) != 0}, exact)


def _float_max(v: TensorVector) -> float:
    return float(scalar.max_abs(v.num)) / v.den


# raw operator layer


def _cached(sd, key, build):
    if key not in sd._cache:
        sd._cache[key] = build()
    return sd._cache[key]


def _adjacency(sd):
    def build():
        a = sd.graph.adjacency
        return a if sd.exact else a.astype(float)

    return _cached(sd, "adj", build)


def _pair_factor(arr_ndim: int, axis: int, table: np.ndarray) -> np.ndarray:
    """Broadcast a pair table over the two coordinates complementary to ``axis``."""
    lead = (1,) * (arr_ndim - 3)
    if axis == 1:  # dist(y, z)
        f = table[None, :, :]
    elif axis == 2:  # dist(z, x), indexed [x, z]
        f = table[:, None, :]
    else:  # dist(x, y)
        f = table[:, :, None]
    return f.reshape(lead + f.shape)


def _check_axis(axis):
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis!r}")


def _check_index(sd, index):
    if not isinstance(index, (int, np.integer)) or not 0 <= index <= sd.D:
        raise IndexError(f"index must be in 0..{sd.D}, got {index!r}")


def apply_raw(sd, kind: str, axis: int, index, arr: np.ndarray):
    """Apply one operator to the trailing (n, n, n) block of ``arr``.

    Returns ``(out, factor)``: the true image is ``out / factor`` times the
    input's own scale.  ``factor`` is 1 in float mode.
    """
    _check_axis(axis)
    n = sd.n
    if arr.shape[-3:] != (n, n, n):
        raise ValueError(f"dimension mismatch: expected trailing shape {(n, n, n)}, got {arr.shape}")
    ax = arr.ndim - 3 + axis - 1
    if kind == "A":
        return scalar.matmul_axis(arr, _adjacency(sd), ax), 1
    if kind == "E":
        _check_index(sd, index)
        return scalar.matmul_axis(arr, sd.idem_num[index], ax), sd.idem_den[index] if sd.exact else 1
    if kind == "Astar":
        W, L = sd.astar_weights()
        f = _pair_factor(arr.ndim, axis, W)
        return (scalar.imul(arr, f) if sd.exact else arr * f), L
    if kind == "Estar":
        _check_index(sd, index)
        mask = _pair_factor(arr.ndim, axis, sd.graph.dist == index)
        return np.where(mask, arr, 0).astype(arr.dtype, copy=False), 1
    raise ValueError(f"unknown operator kind {kind!r}")


def _check_vector(sd, v: TensorVector):
    if not isinstance(v, TensorVector):
        raise TypeError("expected a TensorVector")
    if v.n != sd.n:
        raise ValueError(f"dimension mismatch: vector has n={v.n}, graph has n={sd.n}")
    if v.exact != sd.exact:
        raise ValueError("vector and spectral data use different scalar modes")


def _apply(sd, kind, axis, index, v):
    _check_vector(sd, v)
    out, f = apply_raw(sd, kind, axis, index, v.num)
    return TensorVector(out, v.den * f).reduced()


def apply_A(sd, r: int, v: TensorVector) -> TensorVector:
    """Sum over neighbours in coordinate ``r``."""
    return _apply(sd, "A", r, None, v)


def apply_Astar(sd, r: int, v: TensorVector) -> TensorVector:
    """Scale each triple by theta* of the distance between the other two coordinates."""
    return _apply(sd, "Astar", r, None, v)


def apply_E(sd, r: int, i: int, v: TensorVector) -> TensorVector:
    """Contract E_i along coordinate ``r``."""
    return _apply(sd, "E", r, i, v)


def apply_Estar(sd, r: int, i: int, v: TensorVector) -> TensorVector:
    """Keep the triples whose complementary-pair distance is ``i``."""
    return _apply(sd, "Estar", r, i, v)


def inner_product(u: TensorVector, v: TensorVector):
    """Real dot product; the vertex triples are orthonormal."""
    if u.n != v.n:
        raise ValueError(f"dimension mismatch: n={u.n} vs n={v.n}")
    if u.exact and v.exact:
        return Fraction(scalar.idot(u.num, v.num), u.den * v.den)
    return float(np.dot(np.asarray(u.num, float).ravel(), np.asarray(v.num, float).ravel())) / (u.den * v.den)


@dataclass(frozen=True, eq=False)
class OperatorHandle:
    """One of A(r), Astar(r), E(r, i), Estar(r, i) bound to spectral data."""

    kind: str
    axis: int
    index: int | None = None
    sd: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        _check_axis(self.axis)
        if (self.kind in ("E", "Estar")) != (self.index is not None):
            raise ValueError(f"{self.kind} handles {'need' if self.index is None else 'take no'} index")

    @property
    def label(self) -> str:
        idx = "" if self.index is None else f",{self.index}"
        return f"{self.kind}({self.axis}{idx})"

    @property
    def mixing_axes(self) -> frozenset:
        """Axes whose coordinates the operator moves; diagonal operators move none."""
        return frozenset({self.axis}) if self.kind in ("A", "E") else frozenset()

    def raw(self, arr):
        return apply_raw(self.sd, self.kind, self.axis, self.index, arr)

    def __call__(self, v: TensorVector) -> TensorVector:
        return _apply(self.sd, self.kind, self.axis, self.index, v)

    def __repr__(self):
        return f"OperatorHandle({self.label})"


def generators(sd) -> list[OperatorHandle]:
    """The six generators in closure order: A(1), A(2), A(3), Astar(1), Astar(2), Astar(3)."""
    return [OperatorHandle(k, r, None, sd) for k in ("A", "Astar") for r in (1, 2, 3)]


def _random_sparse(n, rng, exact, nnz=8):
    v = TensorVector.zeros(n, exact)
    flat = v.num.reshape(-1)
    idx = rng.choice(n**3, size=min(nnz, n**3), replace=False)
    if exact:
        flat[idx] = rng.integers(-9, 10, size=idx.size)
    else:
        flat[idx] = rng.standard_normal(idx.size)
    return v


def self_adjointness_probe(handle: OperatorHandle, trials: int = 8, seed: int = 0):
    """Max over random sparse pairs (u, v) of |<Hu, v> - <u, Hv>|.

    Exact mode returns a Fraction (0 for every symmetric handle).  Float
    mode returns the raw defect; compare it against tol times the scale of
    the inner products.
    """
    sd = handle.sd
    rng = np.random.default_rng(seed)
    worst = Fraction(0) if sd.exact else 0.0
    for _ in range(trials):
        u = _random_sparse(sd.n, rng, sd.exact)
        v = _random_sparse(sd.n, rng, sd.exact)
        d = abs(inner_product(handle(u), v) - inner_product(u, handle(v)))
        worst = max(worst, d)
    return worst
