import itertools
from fractions import Fraction as F

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import float_idempotents, graph, sdata
from tdcube.graphs import build_from_edges, build_named
from tdcube.spectral import (
    ExactModeUnavailable,
    NotQPolynomial,
    SpectralError,
    eigen_decompose,
    find_q_polynomial_orderings,
    krein_parameters,
    spectral_data,
    td_scalars,
)

EXACT = ["complete:3", "complete:4", "complete:5", "hamming:2,3", "hamming:2,4", "hamming:3,3", "hypercube:3", "petersen"]
HAMMING = ["complete:3", "complete:4", "complete:5", "hamming:2,3", "hamming:2,4", "hamming:3,3"]


def _fr(xs):
    return [F(x) for x in xs]


@pytest.mark.parametrize(
    "name,theta,mult",
    [
        ("hamming:2,3", [4, 1, -2], (1, 4, 4)),
        ("complete:4", [3, -1], (1, 3)),
        ("petersen", [3, 1, -2], (1, 5, 4)),
        ("hamming:3,3", [6, 3, 0, -3], (1, 6, 12, 8)),
    ],
)
def test_eigenvalues(name, theta, mult):
    sd = sdata(name)
    assert sd.exact
    assert list(sd.eigenvalues) == _fr(theta)
    assert sd.multiplicities == mult


@pytest.mark.parametrize("name", EXACT)
def test_resolution_of_identity(name):
    sd = sdata(name)
    n = sd.n
    E = [sd.idempotent(i) for i in range(sd.D + 1)]  # Fraction object arrays
    assert np.all(sum(E) == np.eye(n, dtype=int))
    A = sd.graph.adjacency
    assert np.all(sum(t * e for t, e in zip(sd.eigenvalues, E)) == A)
    for i, j in itertools.product(range(sd.D + 1), repeat=2):
        prod = E[i].dot(E[j])
        assert np.all(prod == (E[i] if i == j else 0))
    assert [int(np.trace(e)) for e in E] == list(sd.multiplicities)


@pytest.mark.parametrize("name", EXACT)
def test_E0_is_averaging(name):
    sd = sdata(name)
    assert sd.eigenvalues[0] == sd.graph.valencies[1]
    assert np.all(sd.idempotent(0) == F(1, sd.n))


@pytest.mark.parametrize("name", EXACT + ["cycle:5", "cycle:7"])
def test_idempotents_match_eigensolver(name):
    sd = sdata(name)
    theta, oracle = float_idempotents(sd.graph.adjacency)
    mine = {round(float(t), 6): np.asarray(sd.idempotent(i), dtype=float) for i, t in enumerate(sd.eigenvalues)}
    assert set(mine) == set(theta)
    for t, e in zip(theta, oracle):
        assert np.allclose(mine[t], e, atol=1e-9)


def _oracle_krein(sd):
    """q^h_{ij} = n trace((E_i o E_j) E_h) / m_h from a float eigensolver, in the installed ordering."""
    theta, Es = float_idempotents(sd.graph.adjacency)
    pos = {t: k for k, t in enumerate(theta)}
    E = [Es[pos[round(float(t), 6)]] for t in sd.eigenvalues]
    D, n = sd.D, sd.n
    q = np.zeros((D + 1,) * 3)
    for h, i, j in itertools.product(range(D + 1), repeat=3):
        q[h, i, j] = n * np.trace((E[i] * E[j]) @ E[h]) / np.trace(E[h])
    return q


@pytest.mark.parametrize("name", EXACT + ["cycle:5"])
def test_krein_against_oracle(name):
    sd = sdata(name)
    assert np.allclose(np.asarray(sd.krein, dtype=float), _oracle_krein(sd), atol=1e-8)


@pytest.mark.parametrize("name", EXACT)
def test_krein_basic_identities(name):
    sd = sdata(name)
    q = sd.krein
    m = sd.multiplicities
    R = range(sd.D + 1)
    for i, j in itertools.product(R, R):
        assert q[0, i, j] == (m[i] if i == j else 0)
    for h, i, j in itertools.product(R, R, R):
        assert q[h, i, j] == q[h, j, i]
        assert q[h, i, j] >= 0
    for h, i in itertools.product(R, R):
        assert sum(q[h, i, :]) == m[i]


@pytest.mark.parametrize("name", HAMMING)
def test_hamming_self_dual(name):
    sd = sdata(name)
    assert np.all(sd.krein == sd.graph.intersection)


def test_petersen_krein_pinned():
    sd = sdata("petersen")
    pinned = [
        [[1, 0, 0], [0, 5, 0], [0, 0, 4]],
        [[0, 1, 0], [1, F(20, 9), F(16, 9)], [0, F(16, 9), F(20, 9)]],
        [[0, 0, 1], [0, F(20, 9), F(25, 9)], [1, F(25, 9), F(2, 9)]],
    ]
    assert sd.krein[:, 1, :].tolist() == [[0, 5, 0], [1, F(20, 9), F(16, 9)], [0, F(20, 9), F(25, 9)]]
    assert sd.krein.tolist() == pinned


@pytest.mark.parametrize(
    "name,theta",
    [("hamming:2,3", (4, 1, -2)), ("petersen", (3, 1, -2)), ("hamming:2,2", (2, 0, -2)), ("hypercube:3", (3, 1, -1, -3))],
)
def test_canonical_ordering(name, theta):
    sd = sdata(name)
    assert tuple(sd.eigenvalues) == tuple(_fr(theta))


def test_cycle4_ordering_accepted():
    es = eigen_decompose(build_named("cycle:4"))
    search = find_q_polynomial_orderings(es)
    assert [tuple(es.eigenvalues[k] for k in o) for o in search.accepted][0] == tuple(_fr([2, 0, -2]))


def test_every_accepted_ordering_satisfies_condition():
    for name in ("hamming:2,3", "petersen", "cycle:5", "hamming:3,3"):
        sd = sdata(name)
        for idx in range(len(sd.orderings)):
            alt = spectral_data(sd.graph, ordering_index=idx)
            q = alt.krein
            for i, j in itertools.product(range(alt.D + 1), repeat=2):
                if abs(i - j) > 1:
                    assert abs(float(q[i, 1, j])) < 1e-7
            for j in range(alt.D):
                assert abs(float(q[j + 1, 1, j])) > 1e-7


def test_ordering_index_out_of_range():
    with pytest.raises(IndexError):
        spectral_data(graph("hamming:3,3"), ordering_index=5)


@pytest.mark.parametrize(
    "name,dual",
    [
        ("hamming:2,3", [4, 1, -2]),
        ("complete:4", [3, -1]),
        ("petersen", [5, F(5, 3), F(-5, 3)]),
        ("hamming:3,3", [6, 3, 0, -3]),
    ],
)
def test_dual_eigenvalues(name, dual):
    sd = sdata(name)
    assert list(sd.dual_eigenvalues) == _fr(dual)
    # oracle: n * E1 read off one pair per distance class, from the float eigensolver
    theta, Es = float_idempotents(sd.graph.adjacency)
    E1 = Es[theta.index(round(float(sd.eigenvalues[1]), 6))]
    dist = sd.graph.dist
    for i in range(sd.D + 1):
        x, y = np.argwhere(dist == i)[0]
        assert np.isclose(sd.n * E1[x, y], float(sd.dual_eigenvalues[i]))


@pytest.mark.parametrize(
    "name,expected,conventional",
    [
        ("hamming:2,3", dict(beta=2, gamma=0, gamma_star=0, rho=9, rho_star=9), ["beta"]),
        ("hamming:3,3", dict(beta=2, gamma=0, gamma_star=0, rho=9, rho_star=9), []),
        ("complete:5", dict(beta=2, gamma=0, gamma_star=0, rho=25, rho_star=25), ["beta", "gamma", "gamma_star"]),
        ("complete:4", dict(beta=2, gamma=0, gamma_star=0, rho=16, rho_star=16), ["beta", "gamma", "gamma_star"]),
        ("hamming:2,4", dict(beta=2, gamma=0, gamma_star=0, rho=16, rho_star=16), ["beta"]),
        ("petersen", dict(beta=2, gamma=-1, gamma_star=0, rho=8, rho_star=F(100, 9)), ["beta"]),
    ],
)
def test_td_scalars(name, expected, conventional):
    td = sdata(name).td
    for k, v in expected.items():
        assert getattr(td, k) == v, k
    assert sorted(td.conventional) == sorted(conventional)


def _td_formula(seq, beta, gamma, i):
    a, b = seq[i - 1], seq[i]
    return a * a - beta * a * b + b * b - gamma * (a + b)


@pytest.mark.parametrize("name", ["hamming:3,3", "hypercube:3", "petersen", "hamming:2,3"])
def test_td_scalars_consistent_over_indices(name):
    sd = sdata(name)
    td = sd.td
    for seq, g, r in ((sd.eigenvalues, td.gamma, td.rho), (sd.dual_eigenvalues, td.gamma_star, td.rho_star)):
        for i in range(1, sd.D + 1):
            assert _td_formula(seq, td.beta, g, i) == r
        for i in range(1, sd.D):
            assert seq[i - 1] - td.beta * seq[i] + seq[i + 1] == g


def test_td_scalars_inconsistent():
    # a sequence that is not of the recurrence type
    with pytest.raises(SpectralError):
        td_scalars(_fr([10, 3, 1, 0, -7]), _fr([10, 3, 1, 0, -7]))


@pytest.mark.parametrize("D,N", [(2, 3), (3, 3), (2, 5), (4, 3), (3, 4)])
def test_hamming_closed_forms(D, N):
    # theta_i = theta*_i = D(N-1) - iN, beta = 2, gamma = 0, rho = N^2
    sd = spectral_data(build_named(f"hamming:{D},{N}"))
    expected = _fr([D * (N - 1) - i * N for i in range(D + 1)])
    assert list(sd.eigenvalues) == expected == list(sd.dual_eigenvalues)
    assert (sd.td.beta, sd.td.gamma, sd.td.rho, sd.td.rho_star) == (2, 0, N * N, N * N)


def test_float_mode_agrees_with_exact():
    ex = sdata("petersen")
    fl = spectral_data(graph("petersen"), mode="float")
    assert not fl.exact
    assert np.allclose(np.asarray(ex.krein, dtype=float), fl.krein, atol=1e-9)
    assert np.allclose([float(x) for x in ex.dual_eigenvalues], fl.dual_eigenvalues)
    assert np.isclose(float(ex.td.rho_star), fl.td.rho_star)


def test_exact_mode_unavailable_for_irrational():
    with pytest.raises(ExactModeUnavailable):
        spectral_data(graph("cycle:5"), mode="exact")
    assert not sdata("cycle:5").exact


def _line_graph_of_petersen():
    G = nx.convert_node_labels_to_integers(nx.line_graph(nx.petersen_graph()))
    return build_from_edges(G.number_of_nodes(), list(G.edges()), name="L(petersen)")


@pytest.mark.parametrize(
    "make",
    [
        _line_graph_of_petersen,
        lambda: build_from_edges(20, nx.convert_node_labels_to_integers(nx.desargues_graph()).edges()),
    ],
    ids=["line-petersen", "desargues"],
)
def test_not_q_polynomial(make):
    g = make()
    with pytest.raises(NotQPolynomial):
        spectral_data(g)


def test_line_graph_vanishing_only_orderings():
    with pytest.raises(NotQPolynomial) as info:
        spectral_data(_line_graph_of_petersen())
    assert len(info.value.vanishing_only) == 2


def test_with_td_overrides():
    sd = sdata("complete:4")
    bad = sd.with_td(rho=15)
    assert bad.td.rho == 15 and sd.td.rho == 16


@settings(max_examples=15, deadline=None)
@given(st.integers(3, 12))
def test_cycles(n):
    sd = spectral_data(build_named(f"cycle:{n}"))
    assert sum(sd.multiplicities) == n
    assert float(sd.eigenvalues[0]) == pytest.approx(2)
    assert len(set(np.round(np.asarray(sd.dual_eigenvalues, dtype=float), 8))) == sd.D + 1
