"""Mechanical verification of the operator identities on V⊗3.

Each identity is written as a noncommutative polynomial in the operator
handles and evaluated on a probe set.  Below the exhaustive threshold the
probe set certifies the identity on all of V⊗3: an operator built from
A/E on some "mixing" axes and diagonal operators elsewhere keeps the
coordinates of every other axis fixed, so the images of the basis triples
sharing a mixing-axis part have disjoint supports.  Probing with
``e_m ⊗ 1`` (one probe per mixing-axis basis index m) therefore sees every
basis triple separately, with at most n^2 probes instead of n^3.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from . import scalar
from .tensor3 import apply_raw

__all__ = [
    "EXHAUSTIVE_THRESHOLD",
    "RANDOM_PROBES",
    "RelationReport",
    "NCPoly",
    "ProbePolicy",
    "check_commutations",
    "check_tridiagonal",
    "check_triple_products",
    "check_triple_product",
    "check_E0_sandwich",
    "run_all",
]

EXHAUSTIVE_THRESHOLD = 32768
RANDOM_PROBES = 64
_CHUNK_ENTRIES = 2**22


def A(r):
    return ("A", r, None)


def As(r):
    return ("Astar", r, None)


def E(r, i):
    return ("E", r, i)


def Es(r, i):
    return ("Estar", r, i)


class NCPoly:
    """Noncommutative polynomial: a map from words (leftmost letter applied last) to coefficients."""

    def __init__(self, terms=None):
        self.terms = {}
        for w, c in (terms or {}).items():
            if c != 0:
                self.terms[tuple(w)] = c

    @classmethod
    def letter(cls, key):
        return cls({(key,): 1})

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return NCPoly(out)

    def __neg__(self):
        return NCPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, NCPoly):
            out = {}
            for (w1, c1), (w2, c2) in itertools.product(self.terms.items(), other.terms.items()):
                out[w1 + w2] = out.get(w1 + w2, 0) + c1 * c2
            return NCPoly(out)
        return NCPoly({w: c * other for w, c in self.terms.items()})

    def __rmul__(self, c):
        return self * c

    def comm(self, other):
        return self * other - other * self

    def mixing_axes(self) -> frozenset:
        return frozenset(k[1] for w in self.terms for k in w if k[0] in ("A", "E"))

    def __repr__(self):
        return " + ".join(f"{c}*{'.'.join(k[0] + str(k[1:]) for k in w)}" for w, c in self.terms.items())


@dataclass(frozen=True)
class ProbePolicy:
    """How probes are chosen: ``exhaustive`` (mixing-axis basis) or ``random``."""

    kind: str
    count: int
    threshold: int
    seed: int = 0

    def describe(self) -> str:
        if self.kind == "exhaustive":
            return f"exhaustive ({self.count} superposed basis probes, n^3 <= {self.threshold})"
        return f"random ({self.count} probes: {RANDOM_PROBES} sparse + ones + P000, seed {self.seed})"


@dataclass(frozen=True)
class RelationReport:
    """Outcome of one relation instance.

    ``passed`` is True iff the defect is within tolerance (exactly 0 in exact
    mode).  ``asserted`` separates identities that must hold from negative
    controls, which are expected to fail.
    """

    relation_id: str
    instance: tuple
    defect: object
    passed: bool
    policy: str
    asserted: bool = True
    detail: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        return {
            "relation": self.relation_id,
            "instance": list(self.instance),
            "defect": scalar.render(self.defect),
            "verdict": self.verdict,
            "asserted": self.asserted,
            "probes": self.policy,
        }


def _n3(sd):
    return sd.n**3


def _exhaustive_batches(n, axes, dtype):
    axes = sorted(axes)
    combos = list(itertools.product(range(n), repeat=len(axes)))
    per = max(1, _CHUNK_ENTRIES // n**3)
    for start in range(0, len(combos), per):
        chunk = combos[start : start + per]
        arr = np.zeros((len(chunk), n, n, n), dtype=dtype)
        for b, m in enumerate(chunk):
            idx = [slice(None)] * 3
            for a, v in zip(axes, m):
                idx[a - 1] = v
            arr[(b, *idx)] = 1
        yield arr


def _random_batches(n, exact, seed):
    rng = np.random.default_rng(seed)
    dtype = np.int64 if exact else float
    size = n**3
    arr = np.zeros((RANDOM_PROBES + 2, size), dtype=dtype)
    for b in range(RANDOM_PROBES):
        idx = rng.choice(size, size=min(4, size), replace=False)
        arr[b, idx] = rng.integers(1, 6, size=idx.size) * rng.choice([-1, 1], size=idx.size)
    arr[RANDOM_PROBES] = 1
    diag = np.arange(n) * (n * n + n + 1)
    arr[RANDOM_PROBES + 1, diag] = 1
    arr = arr.reshape((-1, n, n, n))
    per = max(1, _CHUNK_ENTRIES // size)
    for start in range(0, arr.shape[0], per):
        yield arr[start : start + per]


def _policy(sd, poly, threshold, seed):
    if _n3(sd) <= threshold:
        return ProbePolicy("exhaustive", sd.n ** len(poly.mixing_axes()), threshold)
    return ProbePolicy("random", RANDOM_PROBES + 2, threshold, seed)


def _batches(sd, poly, policy):
    dtype = np.int64 if sd.exact else float
    if policy.kind == "exhaustive":
        return _exhaustive_batches(sd.n, poly.mixing_axes(), dtype)
    return _random_batches(sd.n, sd.exact, policy.seed)


def _evaluate(sd, poly, probes):
    """Residual of ``poly`` on a probe batch.

    Returns ``(residual, den, scale)``: the true residual is ``residual/den``
    and ``scale`` is the largest entry among the individual terms.
    """
    memo = {(): (probes, 1)}

    def image(word):
        if word not in memo:
            prev, f = image(word[1:])
            out, g = apply_raw(sd, *word[0], prev)
            memo[word] = (out, f * g)
        return memo[word]

    terms = [(c, *image(w)) for w, c in sorted(poly.terms.items(), key=lambda t: (len(t[0]), t[0]), reverse=True)]
    if sd.exact:
        coefs = [Fraction(c) / f for c, _, f in terms]
        L = 1
        for q in coefs:
            L = L * q.denominator // gcd(L, q.denominator)
        res = np.zeros_like(probes)
        scale = Fraction(0)
        for q, (_, out, _) in zip(coefs, terms):
            k = int(q * L)
            res = scalar.ilincomb(1, res, k, out)
            scale = max(scale, abs(q) * scalar.max_abs(out))
        return res, L, scale
    res = np.zeros(probes.shape)
    scale = 0.0
    for c, out, _ in terms:
        res = res + c * out
        scale = max(scale, abs(c) * float(np.max(np.abs(out), initial=0.0)))
    return res, 1, scale


def _measure(sd, poly, threshold, seed):
    policy = _policy(sd, poly, threshold, seed)
    worst = Fraction(0) if sd.exact else 0.0
    worst_scale = 0.0
    for probes in _batches(sd, poly, policy):
        res, den, scale = _evaluate(sd, poly, probes)
        pmax = np.max(np.abs(probes).reshape(probes.shape[0], -1), axis=1)
        rmax = np.max(np.abs(res).reshape(res.shape[0], -1), axis=1)
        for r, p in zip(rmax, pmax):
            d = Fraction(int(r), den * int(p)) if sd.exact else float(r) / float(p)
            worst = max(worst, d)
        if not sd.exact:
            worst_scale = max(worst_scale, float(scale), float(max(pmax)))
    if sd.exact:
        passed = worst == 0
    else:
        passed = worst <= sd.tol * float(worst_scale)
    return worst, passed, policy


def _report(sd, rid, instance, poly, threshold, seed, asserted=True):
    defect, passed, policy = _measure(sd, poly, threshold, seed)
    return RelationReport(rid, tuple(instance), defect, passed, policy.describe(), asserted)


def _L(key):
    return NCPoly.letter(key)


def check_commutations(sd, threshold: int = EXHAUSTIVE_THRESHOLD, seed: int = 0) -> list[RelationReport]:
    """The nine commutators [A_i, A_j], [A*_i, A*_j] (i < j) and [A_i, A*_i]."""
    out = []
    for i, j in itertools.combinations((1, 2, 3), 2):
        out.append(_report(sd, "comm_A", (i, j), _L(A(i)).comm(_L(A(j))), threshold, seed))
    for i, j in itertools.combinations((1, 2, 3), 2):
        out.append(_report(sd, "comm_Astar", (i, j), _L(As(i)).comm(_L(As(j))), threshold, seed))
    for i in (1, 2, 3):
        out.append(_report(sd, "comm_A_Astar", (i, i), _L(A(i)).comm(_L(As(i))), threshold, seed))
    return out


def tridiagonal_polys(td, r, s):
    """Both bracket expressions with A := A(r), B := Astar(s)."""
    a, b = _L(A(r)), _L(As(s))
    beta, g, gs, rho, rhos = td.beta, td.gamma, td.gamma_star, td.rho, td.rho_star
    inner1 = a * a * b - beta * (a * b * a) + b * a * a - g * (a * b + b * a) - rho * b
    inner2 = b * b * a - beta * (b * a * b) + a * b * b - gs * (b * a + a * b) - rhos * a
    return a.comm(inner1), b.comm(inner2)


def check_tridiagonal(sd, r: int, s: int, scalars=None, threshold: int = EXHAUSTIVE_THRESHOLD, seed: int = 0):
    """Both tridiagonal relations for the pair (A(r), Astar(s)), r != s.

    ``scalars`` overrides the installed (beta, gamma, gamma*, rho, rho*);
    reports computed with overridden scalars are marked not asserted.
    """
    if r == s or r not in (1, 2, 3) or s not in (1, 2, 3):
        raise ValueError(f"need distinct axes in 1..3, got r={r}, s={s}")
    td = sd.td if scalars is None else scalars
    p1, p2 = tridiagonal_polys(td, r, s)
    asserted = scalars is None
    return (
        _report(sd, "tridiagonal_A", (r, s), p1, threshold, seed, asserted),
        _report(sd, "tridiagonal_Astar", (r, s), p2, threshold, seed, asserted),
    )


def check_triple_product(sd, kind: str, r: int, s: int, i: int, j: int, threshold=EXHAUSTIVE_THRESHOLD, seed=0):
    """One sandwich ``Estar_i(s) A(r) Estar_j(s)`` (kind "Estar_A") or ``E_i(s) Astar(r) E_j(s)`` ("E_Astar").

    Asserted only when |i - j| > 1; other index pairs serve as controls.
    """
    if r == s:
        raise ValueError("need distinct axes")
    if kind == "Estar_A":
        poly = _L(Es(s, i)) * _L(A(r)) * _L(Es(s, j))
    elif kind == "E_Astar":
        poly = _L(E(s, i)) * _L(As(r)) * _L(E(s, j))
    else:
        raise ValueError(f"unknown triple product kind {kind!r}")
    return _report(sd, f"triple_{kind}", (r, s, i, j), poly, threshold, seed, abs(i - j) > 1)


def check_triple_products(sd, threshold: int = EXHAUSTIVE_THRESHOLD, seed: int = 0) -> list[RelationReport]:
    """All placements r != s and index pairs |i - j| > 1 of both sandwich families."""
    out = []
    pairs = [(i, j) for i in range(sd.D + 1) for j in range(sd.D + 1) if abs(i - j) > 1]
    for kind in ("Estar_A", "E_Astar"):
        for r, s in itertools.permutations((1, 2, 3), 2):
            for i, j in pairs:
                out.append(check_triple_product(sd, kind, r, s, i, j, threshold, seed))
    return out


def check_E0_sandwich(sd, threshold: int = EXHAUSTIVE_THRESHOLD, seed: int = 0, scale=None) -> list[RelationReport]:
    """|X| E0(r) E0*(s) E0(r) = E0(r) and |X| E0*(r) E0(s) E0*(r) = E0*(r) for r != s.

    ``scale`` replaces the factor |X| (negative controls); such reports are
    not asserted.
    """
    c = sd.n if scale is None else scale
    out = []
    for r, s in itertools.permutations((1, 2, 3), 2):
        p1 = c * (_L(E(r, 0)) * _L(Es(s, 0)) * _L(E(r, 0))) - _L(E(r, 0))
        p2 = c * (_L(Es(r, 0)) * _L(E(s, 0)) * _L(Es(r, 0))) - _L(Es(r, 0))
        out.append(_report(sd, "sandwich_E0", (r, s), p1, threshold, seed, scale is None))
        out.append(_report(sd, "sandwich_E0star", (r, s), p2, threshold, seed, scale is None))
    return out


def run_all(sd, threshold: int = EXHAUSTIVE_THRESHOLD, seed: int = 0) -> list[RelationReport]:
    """Every asserted identity: commutations, tridiagonal relations, triple products, sandwiches."""
    out = check_commutations(sd, threshold, seed)
    for r, s in itertools.permutations((1, 2, 3), 2):
        out.extend(check_tridiagonal(sd, r, s, threshold=threshold, seed=seed))
    out.extend(check_triple_products(sd, threshold, seed))
    out.extend(check_E0_sandwich(sd, threshold, seed))
    return out
