"""Profile calculus for Hamming graphs.

A triple (x, y, z) of H(D, N) vertices has a profile (d1, ..., d5) counting
coordinates in each agreement class:

    d1: x = y = z      d2: x != y = z     d3: y != z = x
    d4: z != x = y     d5: x, y, z pairwise distinct

Triples with equal profiles form one automorphism orbit, and the orbit sums
chi(d) span the fundamental module.  Everything here is integer arithmetic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod

import numpy as np

from . import scalar
from .tensor3 import TensorVector

__all__ = [
    "Profile",
    "ProfileVector",
    "enumerate_profiles",
    "profile_of",
    "orbit_size",
    "distances_of_profile",
    "astar_eigenvalue",
    "apply_A_profile",
    "transition_matrix",
    "astar_matrix",
    "profile_index_tensor",
    "chi",
    "embed",
    "extract",
    "brute_force_orbits",
    "kN_closed_forms",
    "kN_golden",
]

Profile = tuple  # (d1, d2, d3, d4, d5)


def enumerate_profiles(D: int) -> list[Profile]:
    """All 5-compositions of D, lexicographically descending; (D,0,0,0,0) first."""
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    out = [p for p in itertools.product(range(D + 1), repeat=5) if sum(p) == D]
    out.sort(reverse=True)
    assert len(out) == comb(D + 4, 4)
    return out


def profile_of(x, y, z) -> Profile:
    """Agreement-class counts of three coordinate tuples of equal length."""
    if not len(x) == len(y) == len(z):
        raise ValueError("vertices must have the same number of coordinates")
    d = [0] * 5
    for a, b, c in zip(x, y, z):
        if a == b == c:
            d[0] += 1
        elif b == c:
            d[1] += 1
        elif c == a:
            d[2] += 1
        elif a == b:
            d[3] += 1
        else:
            d[4] += 1
    return tuple(d)


def _check_profile(p):
    if len(p) != 5 or any(int(t) != t or t < 0 for t in p):
        raise ValueError(f"profile must be five naturals, got {p!r}")


def _check_N(N):
    if N < 3:
        raise ValueError(f"profile calculus needs N >= 3, got {N}")


def orbit_size(p: Profile, N: int) -> int:
    """D!/(d1!...d5!) * N^D (N-1)^(D-d1) (N-2)^d5."""
    _check_profile(p)
    _check_N(N)
    D = sum(p)
    multinomial = factorial(D) // prod(factorial(t) for t in p)
    return multinomial * N**D * (N - 1) ** (D - p[0]) * (N - 2) ** p[4]


def distances_of_profile(p: Profile) -> tuple[int, int, int]:
    """(dist(y, z), dist(z, x), dist(x, y)) for a triple with profile p."""
    _check_profile(p)
    d1, d2, d3, d4, d5 = p
    return (d3 + d4 + d5, d4 + d2 + d5, d2 + d3 + d5)


def astar_eigenvalue(r: int, p: Profile, N: int) -> int:
    """Eigenvalue of Astar(r) on chi(p): N(d1 + d_{r+1}) - D."""
    _check_profile(p)
    if r not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {r!r}")
    return N * (p[0] + p[r]) - sum(p)


# Action tables.  Each row is (shift of the target relative to the source,
# coefficient as a function of the target profile t and N).
_TABLES = {
    1: [
        ((1, -1, 0, 0, 0), lambda t, N: t[0] * (N - 1)),
        ((-1, 1, 0, 0, 0), lambda t, N: t[1]),
        ((0, 0, 1, -1, 0), lambda t, N: t[2]),
        ((0, 0, -1, 1, 0), lambda t, N: t[3]),
        ((0, 0, 1, 0, -1), lambda t, N: t[2] * (N - 2)),
        ((0, 0, -1, 0, 1), lambda t, N: t[4]),
        ((0, 0, 0, 1, -1), lambda t, N: t[3] * (N - 2)),
        ((0, 0, 0, -1, 1), lambda t, N: t[4]),
        ((0, 0, 0, 0, 0), lambda t, N: t[1] * (N - 2) + t[4] * (N - 3)),
    ],
    2: [
        ((1, 0, -1, 0, 0), lambda t, N: t[0] * (N - 1)),
        ((-1, 0, 1, 0, 0), lambda t, N: t[2]),
        ((0, -1, 0, 1, 0), lambda t, N: t[3]),
        ((0, 1, 0, -1, 0), lambda t, N: t[1]),
        ((0, 0, 0, 1, -1), lambda t, N: t[3] * (N - 2)),
        ((0, 0, 0, -1, 1), lambda t, N: t[4]),
        ((0, 1, 0, 0, -1), lambda t, N: t[1] * (N - 2)),
        ((0, -1, 0, 0, 1), lambda t, N: t[4]),
        ((0, 0, 0, 0, 0), lambda t, N: t[2] * (N - 2) + t[4] * (N - 3)),
    ],
    3: [
        ((1, 0, 0, -1, 0), lambda t, N: t[0] * (N - 1)),
        ((-1, 0, 0, 1, 0), lambda t, N: t[3]),
        ((0, 1, -1, 0, 0), lambda t, N: t[1]),
        ((0, -1, 1, 0, 0), lambda t, N: t[2]),
        ((0, 1, 0, 0, -1), lambda t, N: t[1] * (N - 2)),
        ((0, -1, 0, 0, 1), lambda t, N: t[4]),
        ((0, 0, 1, 0, -1), lambda t, N: t[2] * (N - 2)),
        ((0, 0, -1, 0, 1), lambda t, N: t[4]),
        ((0, 0, 0, 0, 0), lambda t, N: t[3] * (N - 2) + t[4] * (N - 3)),
    ],
}


@dataclass(frozen=True)
class ProfileVector:
    """sum over profiles of coeffs[p] * chi(p) in H(D, N)."""

    D: int
    N: int
    coeffs: dict

    @classmethod
    def basis(cls, D, N, p) -> "ProfileVector":
        _check_profile(p)
        if sum(p) != D:
            raise ValueError(f"profile {p} does not sum to {D}")
        return cls(D, N, {tuple(p): 1})

    def coefficient(self, p):
        return self.coeffs.get(tuple(p), 0)

    def as_array(self) -> np.ndarray:
        return np.array([self.coefficient(p) for p in enumerate_profiles(self.D)], dtype=object)

    def __eq__(self, other):
        if not isinstance(other, ProfileVector):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return (self.D, self.N) == (other.D, other.N) and all(
            self.coefficient(k) == other.coefficient(k) for k in keys
        )


def _step(r, p, N):
    """Nonzero (target, coefficient) pairs of A(r) chi(p)."""
    out = {}
    for shift, coef in _TABLES[r]:
        t = tuple(a + b for a, b in zip(p, shift))
        if min(t) < 0:
            continue  # chi of a non-profile is 0
        c = coef(t, N)
        if c:
            out[t] = out.get(t, 0) + c
    return out


def apply_A_profile(r: int, v: ProfileVector) -> ProfileVector:
    """Table-driven action of A(r) on a profile vector."""
    if r not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {r!r}")
    _check_N(v.N)
    out = {}
    for p, c in v.coeffs.items():
        if c == 0:
            continue
        for t, k in _step(r, p, v.N).items():
            out[t] = out.get(t, 0) + c * k
    return ProfileVector(v.D, v.N, {t: c for t, c in out.items() if c != 0})


def transition_matrix(r: int, D: int, N: int) -> np.ndarray:
    """Matrix of A(r) on the profile basis; column j is the image of profile j."""
    _check_N(N)
    profs = enumerate_profiles(D)
    index = {p: k for k, p in enumerate(profs)}
    M = np.zeros((len(profs), len(profs)), dtype=np.int64)
    for j, p in enumerate(profs):
        for t, c in _step(r, p, N).items():
            M[index[t], j] += c
    return M


def astar_matrix(r: int, D: int, N: int) -> np.ndarray:
    return np.diag([astar_eigenvalue(r, p, N) for p in enumerate_profiles(D)]).astype(np.int64)


# bridge to the generic tensor path


def _hamming_params(g):
    if g.hamming is None:
        raise ValueError(f"{g.name} is not a Hamming graph")
    D, N = g.hamming
    _check_N(N)
    return D, N


def profile_index_tensor(g) -> np.ndarray:
    """(n, n, n) array holding the index (in enumerate_profiles order) of each triple's profile."""
    if "profile_index" in g._cache:
        return g._cache["profile_index"]
    D, N = _hamming_params(g)
    c = np.array(g.labels, dtype=np.int64)
    X, Y, Z = c[:, None, None, :], c[None, :, None, :], c[None, None, :, :]
    exy, eyz, ezx = X == Y, Y == Z, Z == X
    cls = [
        exy & eyz,
        eyz & ~exy,
        ezx & ~eyz,
        exy & ~ezx,
        ~exy & ~eyz & ~ezx,
    ]
    counts = [k.sum(axis=3) for k in cls]
    code = np.zeros(counts[0].shape, dtype=np.int64)
    for k in counts:
        code = code * (D + 1) + k
    lookup = np.full((D + 1) ** 5, -1, dtype=np.int64)
    for idx, p in enumerate(enumerate_profiles(D)):
        key = 0
        for t in p:
            key = key * (D + 1) + t
        lookup[key] = idx
    out = lookup[code]
    out.setflags(write=False)
    g._cache["profile_index"] = out
    return out


def chi(g, p: Profile, exact: bool = True) -> TensorVector:
    """Characteristic vector of the orbit of triples with profile p."""
    D, _ = _hamming_params(g)
    profs = enumerate_profiles(D)
    p = tuple(p)
    if p not in profs:
        raise ValueError(f"{p} is not a profile for D={D}")
    mask = profile_index_tensor(g) == profs.index(p)
    return TensorVector(mask.astype(np.int64 if exact else float))


def embed(g, v: ProfileVector) -> TensorVector:
    """The vector of V⊗3 represented by ``v`` (exact)."""
    D, N = _hamming_params(g)
    if (v.D, v.N) != (D, N):
        raise ValueError("profile vector and graph parameters differ")
    profs = enumerate_profiles(D)
    coeffs = [scalar.to_fraction(v.coefficient(p)) for p in profs]
    L = scalar.common_denominator(coeffs)
    table = np.array([int(c * L) for c in coeffs], dtype=object)
    return TensorVector(scalar.shrink(table[profile_index_tensor(g)]), L).reduced()


def extract(g, t: TensorVector) -> ProfileVector:
    """Profile coefficients of a G-invariant vector.

    Raises
    ------
    ValueError
        If ``t`` is not constant on some orbit.
    """
    D, N = _hamming_params(g)
    idx = profile_index_tensor(g).ravel()
    vals = t.num.ravel()
    coeffs = {}
    for k, p in enumerate(enumerate_profiles(D)):
        sel = vals[idx == k]
        first = sel[0]
        if np.any(sel != first):
            raise ValueError(f"vector is not constant on the orbit of profile {p}")
        c = Fraction(int(first), t.den) if t.exact else float(first)
        if c != 0:
            coeffs[p] = c
    return ProfileVector(D, N, coeffs)


def brute_force_orbits(D: int, N: int) -> dict:
    """Profile census by enumerating all N^(3D) triples coordinate-wise."""
    _check_N(N)
    counts = {}
    verts = list(itertools.product(range(N), repeat=D))
    for x in verts:
        for y in verts:
            for z in verts:
                p = profile_of(x, y, z)
                counts[p] = counts.get(p, 0) + 1
    return counts


# complete graphs


def kN_golden(N: int) -> dict:
    """The closed-form 5x5 matrices for K_N on the basis P000, P011, P101, P110, P111.

    ``S`` is returned as (integer matrix, denominator N).
    """
    _check_N(N)
    M = N
    A1 = [[0, M - 1, 0, 0, 0], [1, M - 2, 0, 0, 0], [0, 0, 0, 1, M - 2], [0, 0, 1, 0, M - 2], [0, 0, 1, 1, M - 3]]
    A2 = [[0, 0, M - 1, 0, 0], [0, 0, 0, 1, M - 2], [1, 0, M - 2, 0, 0], [0, 1, 0, 0, M - 2], [0, 1, 0, 1, M - 3]]
    A3 = [[0, 0, 0, M - 1, 0], [0, 0, 1, 0, M - 2], [0, 1, 0, 0, M - 2], [1, 0, 0, M - 2, 0], [0, 1, 1, 0, M - 3]]
    S = [
        [1, M - 1, M - 1, M - 1, (M - 1) * (M - 2)],
        [1, M - 1, -1, -1, 2 - M],
        [1, -1, M - 1, -1, 2 - M],
        [1, -1, -1, M - 1, 2 - M],
        [1, -1, -1, -1, 2],
    ]
    arr = lambda m: np.array(m, dtype=np.int64)  # noqa: E731
    return {
        "A1": arr(A1),
        "A2": arr(A2),
        "A3": arr(A3),
        "Astar1": np.diag([M - 1, M - 1, -1, -1, -1]).astype(np.int64),
        "Astar2": np.diag([M - 1, -1, M - 1, -1, -1]).astype(np.int64),
        "Astar3": np.diag([M - 1, -1, -1, M - 1, -1]).astype(np.int64),
        "S": (arr(S), N),
    }


def kN_closed_forms(N: int) -> dict:
    """Table-driven K_N matrices, the closed forms, and the S checks.

    Returns a dict with ``matrices`` (from the tables), ``S`` (numerator,
    denominator) and ``checks`` (name -> bool).  All checks are exact.

    Raises
    ------
    ValueError
        If any table-driven matrix differs from its closed form.
    """
    gold = kN_golden(N)
    mats = {f"A{r}": transition_matrix(r, 1, N) for r in (1, 2, 3)}
    mats.update({f"Astar{r}": astar_matrix(r, 1, N) for r in (1, 2, 3)})
    bad = [k for k in mats if not np.array_equal(mats[k], gold[k])]
    if bad:
        raise ValueError(f"K_{N}: table-driven matrices differ from closed forms: {bad}")
    S, den = gold["S"]
    checks = {"S^2 = I": np.array_equal(S @ S, den * den * np.eye(5, dtype=np.int64))}
    for r in (1, 2, 3):
        a, s = mats[f"A{r}"], mats[f"Astar{r}"]
        checks[f"S A({r}) = A*({r}) S"] = np.array_equal(S @ a, s @ S)
        checks[f"S A*({r}) = A({r}) S"] = np.array_equal(S @ s, a @ S)
    return {"N": N, "matrices": mats, "S": (S, den), "checks": checks}
