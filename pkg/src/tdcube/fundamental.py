"""The fundamental module generated by the all-ones vector of V⊗3.

Exact mode keeps an orthogonal, unnormalized integer basis (Gram-Schmidt
over the integers with gcd reduction); float mode keeps an orthonormal basis
built by modified Gram-Schmidt with one reorthogonalization pass.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, sqrt

import numpy as np

from . import scalar
from .tensor3 import TensorVector, apply_raw, generators

__all__ = [
    "DEFAULT_CAP",
    "ACCEPT_TOL",
    "DimensionRunaway",
    "PathDisagreement",
    "Subspace",
    "LabeledVector",
    "Membership",
    "generate_lambda",
    "vector_P",
    "vector_Q",
    "all_vectors",
    "check_membership",
    "check_invariance",
    "check_conjecture_EEE",
    "check_conjecture_bases",
]

DEFAULT_CAP = 10_000
ACCEPT_TOL = 1e-8


class DimensionRunaway(RuntimeError):
    """The closure exceeded its dimension cap."""

    def __init__(self, message, dim, queued):
        super().__init__(message)
        self.dim = dim
        self.queued = queued


class PathDisagreement(RuntimeError):
    """Two independent constructions of the same vector disagree."""


@dataclass(frozen=True)
class Membership:
    member: bool
    residual: float  # ||v - proj v|| / ||v||
    residual_sq: object = None  # exact relative squared residual, exact mode only


def _reduce(a: np.ndarray) -> np.ndarray:
    g = scalar.igcd(a)
    if g > 1:
        a = a // g
    return scalar.shrink(a)


class Subspace:
    """A subspace of V⊗3 held as an orthogonal basis.

    ``spanning`` keeps the raw (pre-orthogonalization) vectors that were
    accepted; they span the same space and have much smaller integers.
    """

    def __init__(self, n: int, exact: bool, tol: float | None = None, cap: int = DEFAULT_CAP):
        self.n = n
        self.exact = exact
        self.tol = scalar.default_tolerance() if tol is None else tol
        self.cap = cap
        self._basis: list[np.ndarray] = []
        self._norms: list = []
        self.spanning: list[np.ndarray] = []

    @property
    def ambient_n3(self) -> int:
        return self.n**3

    @property
    def dim(self) -> int:
        return len(self._basis)

    def __len__(self):
        return self.dim

    @property
    def basis(self) -> list[TensorVector]:
        return [TensorVector(b.reshape((self.n,) * 3)) for b in self._basis]

    def spanning_array(self) -> np.ndarray:
        """Raw spanning vectors stacked as (dim, n, n, n)."""
        if not self.spanning:
            return np.zeros((0,) + (self.n,) * 3, dtype=np.int64 if self.exact else float)
        arrs = self.spanning
        if self.exact and any(a.dtype == object for a in arrs):
            arrs = [scalar.widen(a) for a in arrs]
        return np.stack(arrs).reshape((-1,) + (self.n,) * 3)

    def working_array(self) -> np.ndarray:
        """Spanning vectors to push through operators.

        Exact mode uses the small raw integer vectors; float mode uses the
        orthonormal basis so that cancellation noise stays near machine
        epsilon relative to 1.
        """
        if self.exact:
            return self.spanning_array()
        if not self._basis:
            return np.zeros((0,) + (self.n,) * 3)
        return np.stack(self._basis).reshape((-1,) + (self.n,) * 3)

    def _flat(self, v) -> np.ndarray:
        if isinstance(v, TensorVector):
            if v.n != self.n:
                raise ValueError(f"dimension mismatch: n={v.n} vs n={self.n}")
            if v.exact != self.exact:
                raise ValueError("vector and subspace use different scalar modes")
            a = v.num
        else:
            a = np.asarray(v)
        if a.size != self.n**3:
            raise ValueError(f"expected {self.n ** 3} entries, got {a.size}")
        return a.reshape(-1)

    def _residual(self, w: np.ndarray):
        """(r, s) with r = s * (w - projection of w); s > 0 (always 1 in float mode)."""
        if self.exact:
            r, s = w, Fraction(1)
            for b, nb in zip(self._basis, self._norms):
                d = scalar.idot(r, b)
                if d == 0:
                    continue
                g = gcd(nb, d)
                c, e = nb // g, d // g
                r = scalar.ilincomb(c, r, -e, b)
                s *= c
                g2 = scalar.igcd(r)
                if g2 > 1:
                    r = scalar.shrink(r // g2)
                    s /= g2
            return r, s
        r = np.array(w, dtype=float)
        for _ in range(2):
            for b in self._basis:
                r -= np.dot(r, b) * b
        return r, 1.0

    def add(self, v, ref: float = 0.0) -> bool:
        """Orthogonalize ``v`` against the basis; append the residual if it is nonzero.

        In float mode the residual must exceed ACCEPT_TOL times the larger of
        the norm of ``v`` and ``ref`` (the norm of whatever ``v`` was computed
        from).  Returns whether the dimension grew.
        """
        w = self._flat(v)
        if self.exact:
            w = scalar.as_int_array(w)
            if not np.any(w):
                return False
            r, _ = self._residual(w)
            if not np.any(r):
                return False
            r = _reduce(r)
            self._append(r, scalar.idot(r, r), _reduce(w))
            return True
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return False
        r, _ = self._residual(w)
        nr = float(np.linalg.norm(r))
        if nr <= ACCEPT_TOL * max(nw, ref):
            return False
        self._append(r / nr, 1.0, np.array(w, dtype=float))
        return True

    def _append(self, b, norm, raw):
        if self.dim >= self.cap:
            raise DimensionRunaway(f"subspace dimension exceeded the cap of {self.cap}", self.dim, None)
        self._basis.append(b)
        self._norms.append(norm)
        self.spanning.append(raw)

    def membership(self, v) -> Membership:
        w = self._flat(v)
        if self.exact:
            w = scalar.as_int_array(w)
            nw = scalar.idot(w, w)
            if nw == 0:
                return Membership(True, 0.0, Fraction(0))
            r, s = self._residual(w)
            rel = Fraction(scalar.idot(r, r), nw) / (s * s)
            return Membership(rel == 0, sqrt(rel), rel)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return Membership(True, 0.0)
        r, _ = self._residual(w)
        rel = float(np.linalg.norm(r)) / nw
        return Membership(rel <= self.tol, rel)

    def contains(self, other: "Subspace") -> bool:
        return all(self.membership(b).member for b in other._basis)


def check_membership(lam: Subspace, v) -> Membership:
    """Project ``v`` onto ``lam`` and report the relative residual."""
    return lam.membership(v)


def _scaled_int(out, f):
    # direction only; the scale f is irrelevant to spans
    return _reduce(out) if np.issubdtype(out.dtype, np.integer) or out.dtype == object else out


def generate_lambda(sd, cap: int = DEFAULT_CAP) -> Subspace:
    """Closure of the all-ones vector under the six generators.

    Vectors are processed in append order; each is hit by A(1), A(2), A(3),
    Astar(1), Astar(2), Astar(3) in turn and every image that is not already
    in the span is appended.  Generators are applied to the raw images
    rather than the orthogonalized basis; both span the same space.

    Raises
    ------
    DimensionRunaway
        If more than ``cap`` dimensions accumulate.
    """
    lam = Subspace(sd.n, sd.exact, sd.tol, cap)
    gens = generators(sd)
    seed = TensorVector.ones(sd.n, sd.exact)
    lam.add(seed)
    queue = deque([seed.num])
    while queue:
        u = queue.popleft()
        for g in gens:
            out, f = g.raw(u)
            w = _scaled_int(out, f)
            try:
                grew = lam.add(w)
            except DimensionRunaway as exc:
                raise DimensionRunaway(str(exc), exc.dim, len(queue)) from None
            if grew:
                queue.append(lam.spanning[-1].reshape((sd.n,) * 3))
    return lam


def check_invariance(sd, lam: Subspace) -> list[Membership]:
    """Residual off ``lam`` of every generator image of every spanning vector."""
    out = []
    for u in lam.spanning:
        u = u.reshape((sd.n,) * 3)
        for g in generators(sd):
            img, _ = g.raw(u)
            out.append(lam.membership(img))
    return out


# P and Q vectors


@dataclass(frozen=True, eq=False)
class LabeledVector:
    label: tuple  # ("P" | "Q", h, i, j)
    vector: TensorVector
    norm_sq: object

    @property
    def name(self) -> str:
        k, h, i, j = self.label
        return f"{k}({h},{i},{j})"


def _check_indices(sd, *idx):
    for t in idx:
        if not isinstance(t, (int, np.integer)) or not 0 <= t <= sd.D:
            raise IndexError(f"index must be in 0..{sd.D}, got {t!r}")


def _p_mask(dist, h, i, j):
    # dist(y, z) = h, dist(z, x) = i, dist(x, y) = j
    return (dist[None, :, :] == h) & (dist[:, None, :] == i) & (dist[:, :, None] == j)


def vector_P(sd, h: int, i: int, j: int) -> LabeledVector:
    """P_{h,i,j}: the sum of triples with pair distances (h, i, j).

    Built by direct enumeration and as Estar_h(1) Estar_i(2) Estar_j(3) applied to
    the all-ones vector; the two must agree.
    """
    _check_indices(sd, h, i, j)
    direct = _p_mask(sd.graph.dist, h, i, j)
    arr = np.ones((sd.n,) * 3, dtype=np.int64 if sd.exact else float)
    for kind, r, t in (("Estar", 3, j), ("Estar", 2, i), ("Estar", 1, h)):
        arr, _ = apply_raw(sd, kind, r, t, arr)
    if not np.array_equal(arr != 0, direct) or not np.all(arr[direct] == 1):
        raise PathDisagreement(f"P({h},{i},{j}): enumeration and projector paths disagree")
    v = TensorVector(direct.astype(np.int64 if sd.exact else float))
    return LabeledVector(("P", h, i, j), v, v.norm_sq())


def _q_direct(sd, h, i, j):
    n = sd.n
    eh, ei, ej = sd.idem_num[h], sd.idem_num[i], sd.idem_num[j]
    if not sd.exact:
        return TensorVector(n * np.einsum("ax,bx,cx->abc", eh, ei, ej))
    bound = scalar.max_abs(eh) * scalar.max_abs(ei) * scalar.max_abs(ej) * n
    if bound < 2**62:
        num = np.einsum("ax,bx,cx->abc", eh, ei, ej)
    else:
        num = np.zeros((n,) * 3, dtype=object)
        wh, wi, wj = scalar.widen(eh), scalar.widen(ei), scalar.widen(ej)
        for x in range(n):
            num = num + wh[:, x, None, None] * wi[None, :, x, None] * wj[None, None, :, x]
    den = sd.idem_den[h] * sd.idem_den[i] * sd.idem_den[j]
    return TensorVector(scalar.iscale(scalar.shrink(num), n), den).reduced()


def vector_Q(sd, h: int, i: int, j: int) -> LabeledVector:
    """Q_{h,i,j} = |X| sum_x E_h x ⊗ E_i x ⊗ E_j x.

    Cross-checked against |X| E_h(1) E_i(2) E_j(3) applied to P_{0,0,0}.
    """
    _check_indices(sd, h, i, j)
    direct = _q_direct(sd, h, i, j)
    n = sd.n
    arr = np.zeros((n,) * 3, dtype=np.int64 if sd.exact else float)
    arr[np.arange(n), np.arange(n), np.arange(n)] = 1
    den = 1
    for r, t in ((3, j), (2, i), (1, h)):
        arr, f = apply_raw(sd, "E", r, t, arr)
        den *= f
    if sd.exact:
        other = TensorVector(scalar.iscale(arr, n), den).reduced()
        same = other == direct
    else:
        other = TensorVector(n * arr)
        same = other.allclose(direct, max(sd.tol, 1e-9) * 100)
    if not same:
        raise PathDisagreement(f"Q({h},{i},{j}): direct sum and projector paths disagree")
    return LabeledVector(("Q", h, i, j), direct, direct.norm_sq())


def all_vectors(sd, kind: str) -> dict:
    """{(h, i, j): LabeledVector} for every index triple."""
    build = {"P": vector_P, "Q": vector_Q}[kind]
    r = range(sd.D + 1)
    return {t: build(sd, *t) for t in itertools.product(r, r, r)}


# conjecture checkers


def _batch_zero(sd, arr, scale) -> bool:
    if sd.exact:
        return not np.any(arr)
    return float(np.max(np.abs(arr), initial=0.0)) <= ACCEPT_TOL * scale


@dataclass(frozen=True)
class EEEReport:
    cells: tuple  # (h, i, j, projection_zero, q_zero)
    verdict: str

    @property
    def mismatches(self) -> list:
        return [c[:3] for c in self.cells if c[3] != c[4]]

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "cells": [
                {"h": h, "i": i, "j": j, "projection_zero": pz, "q_zero": qz, "consistent": pz == qz}
                for h, i, j, pz, qz in self.cells
            ],
        }


def check_conjecture_EEE(sd, lam: Subspace) -> EEEReport:
    """Compare the vanishing of E_h(1) E_i(2) E_j(3) on ``lam`` with q^h_{i,j} = 0.

    The projections are computed, never inferred from the Krein tensor.
    Verdict is HOLDS iff every cell agrees.
    """
    span = lam.working_array()
    scale = float(np.max(np.abs(span), initial=1.0)) if not sd.exact else 1.0
    R = range(sd.D + 1)
    cells = []
    for j in R:
        a3, _ = apply_raw(sd, "E", 3, j, span)
        for i in R:
            a2, _ = apply_raw(sd, "E", 2, i, a3)
            for h in R:
                a1, _ = apply_raw(sd, "E", 1, h, a2)
                pz = _batch_zero(sd, a1, scale)
                q = sd.krein[h, i, j]
                qz = q == 0 if sd.exact else abs(q) <= 1e-7 * sd.multiplicities[h]
                cells.append((h, i, j, bool(pz), bool(qz)))
    cells.sort()
    verdict = "HOLDS" if all(c[3] == c[4] for c in cells) else "FAILS"
    return EEEReport(tuple(cells), verdict)


@dataclass(frozen=True)
class BasisCase:
    case: str
    family: tuple
    image_dim: int
    family_nonzero: int
    family_dim: int
    family_in_image: bool
    image_in_family: bool

    @property
    def verdict(self) -> str:
        ok = self.image_dim == self.family_dim and self.family_in_image and self.image_in_family
        return "HOLDS" if ok else "FAILS"

    def as_dict(self) -> dict:
        return {
            "case": self.case,
            "family": list(self.family),
            "image_dim": self.image_dim,
            "family_nonzero": self.family_nonzero,
            "family_dim": self.family_dim,
            "family_in_image": self.family_in_image,
            "image_in_family": self.image_in_family,
            "verdict": self.verdict,
        }


def _family_labels(kind, r, D):
    out = []
    for i in range(D + 1):
        t = [i, i, i]
        t[r - 1] = 0
        out.append((kind, *t))
    return out


def check_conjecture_bases(sd, lam: Subspace) -> list[BasisCase]:
    """Six comparisons of E0*(r) Λ with {P} families and E0(r) Λ with {Q} families."""
    span = lam.working_array()
    out = []
    for op, kind in (("Estar", "P"), ("E", "Q")):
        for r in (1, 2, 3):
            img, _ = apply_raw(sd, op, r, 0, span)
            image = Subspace(sd.n, sd.exact, sd.tol)
            for row in img:
                image.add(row, ref=1.0)
            labels = _family_labels(kind, r, sd.D)
            build = vector_P if kind == "P" else vector_Q
            vecs = [build(sd, *lab[1:]).vector for lab in labels]
            nonzero = [v for v in vecs if not v.is_zero(ACCEPT_TOL)]
            fam = Subspace(sd.n, sd.exact, sd.tol)
            for v in nonzero:
                fam.add(v)
            name = f"{'E0*' if op == 'Estar' else 'E0'}({r})"
            out.append(
                BasisCase(
                    name,
                    tuple(f"{k}({h},{i},{j})" for k, h, i, j in labels),
                    image.dim,
                    len(nonzero),
                    fam.dim,
                    image.contains(fam),
                    fam.contains(image),
                )
            )
    return out


def _vmax(v: TensorVector) -> float:
    return float(scalar.max_abs(v.num)) / v.den
