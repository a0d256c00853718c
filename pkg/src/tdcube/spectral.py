"""Bose-Mesner spectral data of a distance-regular graph.

Eigenvalues come from the characteristic polynomial of the (D+1)x(D+1)
intersection matrix.  When every root is rational (hence integral) the
primitive idempotents are built exactly from the product formula and all
downstream quantities are rationals; otherwise everything is float64.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd

import numpy as np
import sympy

from . import scalar
from .graphs import Graph

__all__ = [
    "Eigensystem",
    "OrderingSearch",
    "SpectralData",
    "TDScalars",
    "NotQPolynomial",
    "SpectralError",
    "ExactModeUnavailable",
    "eigen_decompose",
    "krein_parameters",
    "find_q_polynomial_orderings",
    "dual_eigenvalues",
    "td_scalars",
    "spectral_data",
]

MODES = ("auto", "exact", "float")
KREIN_TOL = 1e-7


class SpectralError(RuntimeError):
    """Spectral data failed an internal consistency check."""


class ExactModeUnavailable(SpectralError, ValueError):
    """Exact mode was requested for a graph with non-integral eigenvalues."""


class NotQPolynomial(ValueError):
    """No ordering of the primitive idempotents is Q-polynomial."""

    def __init__(self, message, vanishing_only=()):
        super().__init__(message)
        self.vanishing_only = list(vanishing_only)


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Eigenvalues in decreasing order with their primitive idempotents.

    ``idem_num[i] / idem_den[i]`` is E_i; in float mode the denominators are 1.
    """

    graph: Graph
    exact: bool
    tol: float
    eigenvalues: tuple
    idem_num: tuple
    idem_den: tuple
    multiplicities: tuple

    @property
    def D(self) -> int:
        return len(self.eigenvalues) - 1

    def idempotent(self, i: int) -> np.ndarray:
        if self.exact:
            return scalar.fraction_array(self.idem_num[i], self.idem_den[i])
        return self.idem_num[i]


def _intersection_matrix(g: Graph) -> np.ndarray:
    # column j holds A*A_j in the basis A_0..A_D
    return np.asarray(g.intersection[:, 1, :], dtype=np.int64)


def _exact_product(a: np.ndarray, shifts) -> np.ndarray:
    n = a.shape[0]
    out = np.eye(n, dtype=np.int64)
    for t in shifts:
        out = scalar.matmul_axis(out, a - int(t) * np.eye(n, dtype=np.int64), axis=1)
    return out


def eigen_decompose(g: Graph, mode: str = "auto", tol: float | None = None) -> Eigensystem:
    """Distinct eigenvalues (decreasing) and primitive idempotents of ``g``.

    Raises
    ------
    SpectralError
        If fewer than D+1 distinct eigenvalues appear, or an exact mode was
        requested for a graph with irrational eigenvalues.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    tol = scalar.default_tolerance() if tol is None else tol
    D = g.diameter
    L = _intersection_matrix(g)
    roots = sympy.roots(sympy.Matrix(L.tolist()).charpoly(sympy.Symbol("t")).as_expr(), sympy.Symbol("t"))
    integral = sum(roots.values()) == D + 1 and all(r.is_integer for r in roots)
    if mode == "exact" and not integral:
        raise ExactModeUnavailable(f"{g.name}: eigenvalues are not all integers; exact mode unavailable")
    exact = integral and mode != "float"
    a = g.adjacency
    n = g.n
    if exact:
        theta = sorted((int(r) for r in roots), reverse=True)
        if len(theta) != D + 1:
            raise SpectralError(f"{g.name}: expected {D + 1} distinct eigenvalues, found {len(theta)}")
        nums, dens = [], []
        for i, ti in enumerate(theta):
            others = [t for j, t in enumerate(theta) if j != i]
            num = _exact_product(a, others)
            den = 1
            for t in others:
                den *= ti - t
            if den < 0:
                num, den = -num, -den
            g_ = gcd(scalar.igcd(num), den)
            num, den = num // g_, den // g_
            num.setflags(write=False)
            nums.append(num)
            dens.append(den)
        mults = []
        for num, den in zip(nums, dens):
            tr = Fraction(int(np.trace(num)), den)
            if tr.denominator != 1 or tr <= 0:
                raise SpectralError(f"{g.name}: trace of an idempotent is {tr}")
            mults.append(int(tr))
        eigen = tuple(Fraction(t) for t in theta)
        es = Eigensystem(g, True, tol, eigen, tuple(nums), tuple(dens), tuple(mults))
    else:
        vals = np.sort(np.linalg.eigvals(L.astype(float)).real)[::-1]
        if len(vals) != D + 1 or np.min(np.abs(np.diff(vals)), initial=np.inf) <= 1e-6:
            raise SpectralError(f"{g.name}: expected {D + 1} distinct eigenvalues, got {vals}")
        af = a.astype(float)
        nums, mults = [], []
        for i, ti in enumerate(vals):
            e = np.eye(n)
            for j, tj in enumerate(vals):
                if j != i:
                    e = e @ (af - tj * np.eye(n)) / (ti - tj)
            e = (e + e.T) / 2
            e.setflags(write=False)
            nums.append(e)
            tr = float(np.trace(e))
            m = int(round(tr))
            if m < 1 or abs(tr - m) > 1e-6:
                raise SpectralError(f"{g.name}: trace of an idempotent is {tr}")
            mults.append(m)
        es = Eigensystem(g, False, tol, tuple(float(v) for v in vals), tuple(nums), (1,) * (D + 1), tuple(mults))
    _check_resolution(es)
    return es


def _check_resolution(es: Eigensystem) -> None:
    a = es.graph.adjacency
    n = es.graph.n
    if es.exact:
        L = 1
        for d in es.idem_den:
            L = L * d // gcd(L, d)
        total = sum(scalar.iscale(num, L // d) for num, d in zip(es.idem_num, es.idem_den))
        if not np.array_equal(total, L * np.eye(n, dtype=np.int64)):
            raise SpectralError("idempotents do not sum to the identity")
        for t, num in zip(es.eigenvalues, es.idem_num):
            if not np.array_equal(scalar.matmul_axis(num, a, axis=0), scalar.iscale(num, int(t))):
                raise SpectralError(f"A E_i != theta_i E_i for theta = {t}")
    else:
        total = sum(es.idem_num)
        if np.max(np.abs(total - np.eye(n))) > 1e-6:
            raise SpectralError("idempotents do not sum to the identity")


def krein_parameters(sd) -> np.ndarray:
    """Krein tensor ``q[h, i, j]`` in the index order of ``sd``.

    Recovered from E_i o E_j = |X|^-1 sum_h q^h_{i,j} E_h as
    ``q^h_{i,j} = |X| trace((E_i o E_j) E_h) / m_h``.  Entries are Fractions
    in exact mode.
    """
    D = len(sd.eigenvalues) - 1
    n = sd.graph.n if hasattr(sd, "graph") else sd.idem_num[0].shape[0]
    m = sd.multiplicities
    if sd.exact:
        nums = [scalar.widen(x) for x in sd.idem_num]
        q = np.empty((D + 1,) * 3, dtype=object)
        for h in range(D + 1):
            for i in range(D + 1):
                for j in range(D + 1):
                    s = int(np.sum(nums[i] * nums[j] * nums[h]))
                    q[h, i, j] = Fraction(n * s, m[h] * sd.idem_den[i] * sd.idem_den[j] * sd.idem_den[h])
        bad = [(h, i, j) for h, i, j in np.ndindex(q.shape) if q[h, i, j] < 0]
    else:
        E = np.stack(sd.idem_num)
        q = n * np.einsum("ixy,jxy,hxy->hij", E, E, E) / np.asarray(m, dtype=float)[:, None, None]
        bad = [
            (h, i, j) for h, i, j in np.ndindex(q.shape) if q[h, i, j] < -KREIN_TOL * m[h]
        ]
    if bad:
        raise SpectralError(f"negative Krein parameters at {bad[:5]}")
    return q


def _krein_zero(q, h, i, j, m, exact) -> bool:
    return q[h, i, j] == 0 if exact else abs(q[h, i, j]) <= KREIN_TOL * m[h]


@dataclass(frozen=True)
class OrderingSearch:
    """Orderings of eigenvalue indices (index 0 = valency) that pass the test.

    ``accepted`` satisfy both the tridiagonal vanishing of q^i_{1,j} and the
    nonvanishing of q^{j+1}_{1,j}; ``vanishing_only`` satisfy the first half
    alone and are reported, never installed.
    """

    accepted: tuple
    vanishing_only: tuple


def find_q_polynomial_orderings(es, krein=None) -> OrderingSearch:
    """All Q-polynomial orderings of the primitive idempotents of ``es``.

    Backtracking over positions 1..D; a candidate at position j is pruned as
    soon as some q^{s(i)}_{s(1), s(j)} with i < j-1 is nonzero.  Accepted
    orderings are sorted so that the eigenvalue sequence is lexicographically
    largest first (the ordering closest to decreasing); element 0 is the
    canonical choice.  This puts the natural Hamming ordering first, and
    (3, 1, -2) first for Petersen.
    """
    q = krein_parameters(es) if krein is None else krein
    D = len(es.eigenvalues) - 1
    m = es.multiplicities
    exact = es.exact
    full, vanishing = [], []

    def extend(seq, remaining):
        j = len(seq)
        if j == D + 1:
            ok = all(not _krein_zero(q, seq[t + 1], seq[1], seq[t], m, exact) for t in range(D))
            (full if ok else vanishing).append(tuple(seq))
            return
        for c in remaining:
            if j >= 2:
                e1 = seq[1]
                if not all(
                    _krein_zero(q, seq[i], e1, c, m, exact) and _krein_zero(q, c, e1, seq[i], m, exact)
                    for i in range(j - 1)
                ):
                    continue
            extend(seq + [c], [r for r in remaining if r != c])

    extend([0], list(range(1, D + 1)))

    def key(order):
        return tuple(-es.eigenvalues[k] for k in order)

    full.sort(key=key)
    return OrderingSearch(tuple(full), tuple(vanishing))


def dual_eigenvalues(g: Graph, e1_num, e1_den=1, exact=True, tol=scalar.DEFAULT_TOL) -> tuple:
    """theta*_i = |X| (E_1)_{x,y} for any pair at distance i.

    Raises
    ------
    SpectralError
        If |X| E_1 is not constant on some distance class, or the values are
        not mutually distinct.
    """
    D = g.diameter
    out = []
    scale = scalar.max_abs(e1_num)
    for i in range(D + 1):
        vals = np.asarray(e1_num)[g.dist == i]
        if exact:
            uniq = set(int(v) for v in vals)
            if len(uniq) != 1:
                raise SpectralError(f"|X| E_1 is not constant on distance class {i}")
            out.append(Fraction(g.n * uniq.pop(), e1_den))
        else:
            if float(vals.max() - vals.min()) > tol * max(scale, 1e-300) * 10:
                raise SpectralError(f"|X| E_1 is not constant on distance class {i}")
            out.append(float(g.n * vals.mean()))
    for a in range(D + 1):
        for b in range(a):
            if scalar.is_zero(out[a] - out[b], tol, max(abs(x) for x in out)):
                raise SpectralError(f"dual eigenvalues {b} and {a} coincide")
    return tuple(out)


@dataclass(frozen=True)
class TDScalars:
    """The five tridiagonal scalars; ``conventional`` names any filled by convention."""

    beta: object
    gamma: object
    gamma_star: object
    rho: object
    rho_star: object
    conventional: tuple = ()

    def as_dict(self) -> dict:
        return {
            "beta": scalar.render(self.beta),
            "gamma": scalar.render(self.gamma),
            "gamma_star": scalar.render(self.gamma_star),
            "rho": scalar.render(self.rho),
            "rho_star": scalar.render(self.rho_star),
            "conventional": list(self.conventional),
        }


def _agree(values, what, exact, tol, scale):
    first = values[0]
    for v in values[1:]:
        if exact and v != first or not exact and not scalar.is_zero(v - first, tol, scale):
            raise SpectralError(f"{what} is inconsistent across indices: {values}")
    return first


def td_scalars(theta, theta_star, exact: bool = True, tol: float = scalar.DEFAULT_TOL) -> TDScalars:
    """Compute (beta, gamma, gamma*, rho, rho*) from both sequences and check agreement.

    beta = 2 is conventional when D <= 2, gamma = gamma* = 0 when D <= 1.
    """
    th, ts = list(theta), list(theta_star)
    D = len(th) - 1
    if len(ts) != D + 1:
        raise ValueError("eigenvalue and dual eigenvalue sequences differ in length")
    scale = max(abs(x) for x in th + ts) ** 2
    conventional = []
    if D >= 3:
        vals = []
        for seq in (th, ts):
            for i in range(2, D):
                r = (seq[i - 2] - seq[i + 1]) / (seq[i - 1] - seq[i])
                vals.append(r - 1)
        beta = _agree(vals, "beta", exact, tol, 1.0)
    else:
        beta = Fraction(2) if exact else 2.0
        conventional.append("beta")

    def g_of(seq):
        if D >= 2:
            return _agree(
                [seq[i - 1] - beta * seq[i] + seq[i + 1] for i in range(1, D)], "gamma", exact, tol, scale
            )
        return Fraction(0) if exact else 0.0

    gamma, gamma_star = g_of(th), g_of(ts)
    if D <= 1:
        conventional += ["gamma", "gamma_star"]

    def r_of(seq, g):
        return _agree(
            [
                seq[i - 1] ** 2 - beta * seq[i - 1] * seq[i] + seq[i] ** 2 - g * (seq[i - 1] + seq[i])
                for i in range(1, D + 1)
            ],
            "rho",
            exact,
            tol,
            scale,
        )

    return TDScalars(beta, gamma, gamma_star, r_of(th, gamma), r_of(ts, gamma_star), tuple(conventional))


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Spectral data with a Q-polynomial ordering installed.

    All index-bearing fields (eigenvalues, idempotents, multiplicities,
    Krein tensor) follow the installed ordering; ``ordering[i]`` is the
    position of E_i in the decreasing-eigenvalue order.
    """

    graph: Graph
    exact: bool
    tol: float
    eigenvalues: tuple
    idem_num: tuple
    idem_den: tuple
    multiplicities: tuple
    krein: np.ndarray
    dual_eigenvalues: tuple
    td: TDScalars
    ordering: tuple
    orderings: tuple
    vanishing_only: tuple
    ordering_index: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def D(self) -> int:
        return len(self.eigenvalues) - 1

    @property
    def n(self) -> int:
        return self.graph.n

    def idempotent(self, i: int) -> np.ndarray:
        if self.exact:
            return scalar.fraction_array(self.idem_num[i], self.idem_den[i])
        return self.idem_num[i]

    def astar_weights(self):
        """(W, L) with W[a, b] * 1/L = theta*_{dist(a, b)}; L = 1 in float mode."""
        if "astar" not in self._cache:
            if self.exact:
                L = scalar.common_denominator(self.dual_eigenvalues)
                w = np.array([int(t * L) for t in self.dual_eigenvalues], dtype=np.int64)
            else:
                L = 1
                w = np.array(self.dual_eigenvalues, dtype=float)
            W = w[self.graph.dist]
            W.setflags(write=False)
            self._cache["astar"] = (W, L)
        return self._cache["astar"]

    def with_td(self, **changes) -> "SpectralData":
        """Copy with some tridiagonal scalars replaced (used for negative controls)."""
        return replace(self, td=replace(self.td, **changes), _cache={})

    def report(self) -> dict:
        r = scalar.render
        D = self.D
        return {
            "graph": self.graph.name,
            "exact": self.exact,
            "eigenvalues": [r(t) for t in self.eigenvalues],
            "dual_eigenvalues": [r(t) for t in self.dual_eigenvalues],
            "multiplicities": list(self.multiplicities),
            "td_scalars": self.td.as_dict(),
            "ordering_index": self.ordering_index,
            "q_polynomial_orderings": [list(o) for o in self.orderings],
            "vanishing_only_orderings": [list(o) for o in self.vanishing_only],
            "intersection_numbers": self.graph.intersection.tolist(),
            "krein_parameters": [
                [[r(self.krein[h, i, j]) for j in range(D + 1)] for i in range(D + 1)] for h in range(D + 1)
            ],
        }


def spectral_data(g: Graph, ordering_index: int = 0, mode: str = "auto", tol: float | None = None) -> SpectralData:
    """Full spectral pipeline: eigensystem, Krein tensor, Q-ordering, theta*, scalars.

    Raises
    ------
    NotQPolynomial
        If no ordering passes.
    IndexError
        If ``ordering_index`` does not name an accepted ordering.
    """
    es = eigen_decompose(g, mode, tol)
    q = krein_parameters(es)
    search = find_q_polynomial_orderings(es, q)
    if not search.accepted:
        raise NotQPolynomial(f"{g.name} is not Q-polynomial", search.vanishing_only)
    if not 0 <= ordering_index < len(search.accepted):
        raise IndexError(
            f"{g.name}: ordering index {ordering_index} out of range (0..{len(search.accepted) - 1})"
        )
    order = search.accepted[ordering_index]
    theta = tuple(es.eigenvalues[k] for k in order)
    nums = tuple(es.idem_num[k] for k in order)
    dens = tuple(es.idem_den[k] for k in order)
    mults = tuple(es.multiplicities[k] for k in order)
    qq = q[np.ix_(order, order, order)]
    ts = dual_eigenvalues(g, nums[1], dens[1], es.exact, es.tol) if g.diameter >= 1 else ()
    td = td_scalars(theta, ts, es.exact, es.tol)
    return SpectralData(
        g, es.exact, es.tol, theta, nums, dens, mults, qq, ts, td, order,
        search.accepted, search.vanishing_only, ordering_index,
    )
