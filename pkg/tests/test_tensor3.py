import itertools
import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import sdata
from tdcube.spectral import spectral_data
from tdcube.tensor3 import (
    OperatorHandle,
    TensorVector,
    apply_A,
    apply_Astar,
    apply_E,
    apply_Estar,
    generators,
    inner_product,
    self_adjointness_probe,
)

SMALL = ["complete:3", "complete:4", "hamming:2,3", "petersen", "hypercube:3"]


def e(n, x, y, z):
    return TensorVector.basis(n, (x, y, z))


def _dense_oracle(sd, kind, r, i=None):
    """Explicit n^3 x n^3 matrix via Kronecker products (test oracle only)."""
    n = sd.n
    I = np.eye(n)
    if kind == "A":
        M = np.asarray(sd.graph.adjacency, float)
        mats = [M if a == r else I for a in (1, 2, 3)]
        return np.kron(np.kron(mats[0], mats[1]), mats[2])
    if kind == "E":
        M = np.asarray(sd.idempotent(i), float)
        mats = [M if a == r else I for a in (1, 2, 3)]
        return np.kron(np.kron(mats[0], mats[1]), mats[2])
    dist = sd.graph.dist
    theta = [float(t) for t in sd.dual_eigenvalues]
    diag = np.zeros(n**3)
    for x, y, z in itertools.product(range(n), repeat=3):
        d = {1: dist[y, z], 2: dist[z, x], 3: dist[x, y]}[r]
        diag[x * n * n + y * n + z] = theta[d] if kind == "Astar" else float(d == i)
    return np.diag(diag)


# spec examples


def test_apply_A_K3():
    sd = sdata("complete:3")
    assert apply_A(sd, 1, e(3, 0, 1, 2)) == e(3, 1, 1, 2) + e(3, 2, 1, 2)


def test_apply_A_ones_H23():
    sd = sdata("hamming:2,3")
    one = TensorVector.ones(9)
    assert apply_A(sd, 3, one) == 4 * one


def test_apply_Astar_K4():
    sd = sdata("complete:4")
    v = e(4, 0, 1, 1)
    assert apply_Astar(sd, 1, v) == 3 * v
    assert apply_Astar(sd, 3, v) == -1 * v
    assert apply_Astar(sd, 2, v) == -1 * v


def test_apply_E0_K4():
    sd = sdata("complete:4")
    out = apply_E(sd, 1, 0, e(4, 2, 1, 3))
    expected = sum((e(4, x, 1, 3) for x in range(1, 4)), e(4, 0, 1, 3)) * F(1, 4)
    assert out == expected
    assert out.den == 4


def test_apply_Estar_K4():
    sd = sdata("complete:4")
    assert apply_Estar(sd, 1, 0, e(4, 0, 1, 2)).is_zero()
    assert apply_Estar(sd, 1, 1, e(4, 0, 1, 2)) == e(4, 0, 1, 2)


def test_apply_Estar_support_H23():
    sd = sdata("hamming:2,3")
    out = apply_Estar(sd, 3, 2, TensorVector.ones(9))
    assert out.support_size() == 9 * 4 * 9
    # enumeration oracle
    dist = sd.graph.dist
    assert out.support_size() == sum(1 for x, y, z in itertools.product(range(9), repeat=3) if dist[x, y] == 2)


def test_inner_product_examples():
    a, b = e(5, 0, 1, 2), e(5, 0, 2, 1)
    assert inner_product(a, a) == 1
    assert inner_product(a, b) == 0
    assert TensorVector.ones(5).norm_sq() == 125


def test_dimension_mismatch():
    sd = sdata("complete:4")
    with pytest.raises(ValueError):
        apply_A(sd, 1, TensorVector.ones(3))
    with pytest.raises(ValueError):
        inner_product(TensorVector.ones(3), TensorVector.ones(4))
    with pytest.raises(ValueError):
        TensorVector.ones(3) + TensorVector.ones(4)


def test_bad_index_and_axis():
    sd = sdata("complete:4")
    with pytest.raises((ValueError, IndexError)):
        apply_E(sd, 1, 2, TensorVector.ones(4))
    with pytest.raises((ValueError, IndexError)):
        apply_Estar(sd, 1, -1, TensorVector.ones(4))
    with pytest.raises(ValueError):
        apply_A(sd, 4, TensorVector.ones(4))
    with pytest.raises(ValueError):
        OperatorHandle("E", 1, None, sd)
    with pytest.raises(ValueError):
        OperatorHandle("B", 1, None, sd)


# oracle: matrix-free action equals the Kronecker-product matrix


@pytest.mark.parametrize("name", ["complete:3", "complete:4", "petersen", "hypercube:3"])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_matrix_free_matches_kron(name, r):
    sd = sdata(name)
    n = sd.n
    rng = np.random.default_rng(r)
    v = TensorVector(rng.integers(-3, 4, size=(n, n, n)))
    x = v.values().astype(float).ravel()
    assert np.allclose(np.asarray(apply_A(sd, r, v).values(), float).ravel(), _dense_oracle(sd, "A", r) @ x)
    assert np.allclose(np.asarray(apply_Astar(sd, r, v).values(), float).ravel(), _dense_oracle(sd, "Astar", r) @ x)
    for i in range(sd.D + 1):
        assert np.allclose(np.asarray(apply_E(sd, r, i, v).values(), float).ravel(), _dense_oracle(sd, "E", r, i) @ x)
        assert np.allclose(
            np.asarray(apply_Estar(sd, r, i, v).values(), float).ravel(), _dense_oracle(sd, "Estar", r, i) @ x
        )


# properties


def _vec(n, data):
    vals = data.draw(st.lists(st.integers(-5, 5), min_size=n**3, max_size=n**3))
    return TensorVector(np.array(vals, dtype=np.int64).reshape((n,) * 3))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL[:3]), st.sampled_from(["A", "Astar", "E", "Estar"]), st.integers(1, 3), st.data())
def test_linearity(name, kind, r, data):
    sd = sdata(name)
    h = OperatorHandle(kind, r, 1 if kind in ("E", "Estar") else None, sd)
    u, v = _vec(sd.n, data), _vec(sd.n, data)
    a = F(data.draw(st.integers(-4, 4)), data.draw(st.integers(1, 4)))
    assert h(a * u + v) == a * h(u) + h(v)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 3), st.data())
def test_E_orthogonal_idempotents(name, r, data):
    sd = sdata(name)
    n = sd.n
    v = TensorVector.basis(n, tuple(data.draw(st.integers(0, n - 1)) for _ in range(3)))
    i = data.draw(st.integers(0, sd.D))
    j = data.draw(st.integers(0, sd.D))
    Ej = apply_E(sd, r, j, v)
    lhs = apply_E(sd, r, i, Ej)
    assert lhs == (Ej if i == j else TensorVector.zeros(n))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 3), st.data())
def test_resolutions_of_identity(name, r, data):
    sd = sdata(name)
    v = _vec(sd.n, data)
    total = TensorVector.zeros(sd.n)
    total_star = TensorVector.zeros(sd.n)
    for i in range(sd.D + 1):
        total = total + apply_E(sd, r, i, v)
        total_star = total_star + apply_Estar(sd, r, i, v)
    assert total == v
    assert total_star == v


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 3), st.data())
def test_Astar_on_Estar_image(name, r, data):
    sd = sdata(name)
    v = _vec(sd.n, data)
    i = data.draw(st.integers(0, sd.D))
    w = apply_Estar(sd, r, i, v)
    assert apply_Astar(sd, r, w) == sd.dual_eigenvalues[i] * w


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SMALL), st.integers(1, 3), st.data())
def test_A_on_E_image(name, r, data):
    sd = sdata(name)
    v = _vec(sd.n, data)
    i = data.draw(st.integers(0, sd.D))
    w = apply_E(sd, r, i, v)
    assert apply_A(sd, r, w) == sd.eigenvalues[i] * w


@pytest.mark.parametrize("name", ["hamming:2,3", "petersen"])
def test_E_is_polynomial_in_A(name):
    # E_i = prod_{j != i} (A - theta_j) / (theta_i - theta_j), applied axis-wise
    sd = sdata(name)
    rng = np.random.default_rng(1)
    v = TensorVector(rng.integers(-3, 4, size=(sd.n,) * 3))
    th = sd.eigenvalues
    for r in (1, 2, 3):
        for i in range(sd.D + 1):
            w = v
            for j in range(sd.D + 1):
                if j != i:
                    w = (apply_A(sd, r, w) - th[j] * w) * (1 / (th[i] - th[j]))
            assert w == apply_E(sd, r, i, v)


@pytest.mark.parametrize("name", SMALL)
def test_self_adjoint_exact(name):
    sd = sdata(name)
    handles = generators(sd) + [OperatorHandle(k, r, i, sd) for k in ("E", "Estar") for r in (1, 2, 3) for i in range(sd.D + 1)]
    for h in handles:
        assert self_adjointness_probe(h, trials=4) == 0


def test_self_adjoint_float():
    sd = spectral_data(sdata("hamming:2,4").graph, mode="float")
    assert self_adjointness_probe(OperatorHandle("A", 2, None, sd)) <= 1e-9 * 100
    for i in range(sd.D + 1):
        assert self_adjointness_probe(OperatorHandle("Estar", 1, i, sd)) == 0
        assert self_adjointness_probe(OperatorHandle("E", 3, i, sd)) <= 1e-9 * 100


def test_generators_order():
    sd = sdata("complete:3")
    assert [h.label for h in generators(sd)] == ["A(1)", "A(2)", "A(3)", "Astar(1)", "Astar(2)", "Astar(3)"]


def test_flat_index_layout():
    v = e(4, 1, 2, 3)
    assert list(v.to_sparse()) == [1 * 16 + 2 * 4 + 3]


# serialization


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 4),
    st.dictionaries(st.integers(0, 63), st.fractions(max_denominator=12).filter(lambda f: f != 0), max_size=10),
    st.sampled_from(["sparse", "dense"]),
)
def test_json_roundtrip_exact(n, entries, rep):
    entries = {k: v for k, v in entries.items() if k < n**3}
    v = TensorVector.from_sparse(n, entries)
    doc = json.loads(json.dumps(v.to_json(rep)))
    assert doc["n"] == n and doc["mode"] == "exact" and doc["representation"] == rep
    w = TensorVector.from_json(doc)
    assert w == v
    assert w.to_sparse() == {k: F(x) for k, x in entries.items()}


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=27, max_size=27))
def test_json_roundtrip_float(n, vals):
    v = TensorVector(np.array(vals[: n**3], dtype=float).reshape((n,) * 3))
    for rep in ("sparse", "dense"):
        assert TensorVector.from_json(json.loads(json.dumps(v.to_json(rep)))) == v


def test_sparse_dense_equal():
    v = TensorVector.from_sparse(3, {0: F(1, 2), 26: F(-3)})
    assert np.array_equal(v.values().ravel()[[0, 26]], [F(1, 2), F(-3)])
    assert TensorVector.from_values(v.values()) == v


def test_mixed_modes_rejected():
    with pytest.raises(ValueError):
        TensorVector.ones(2) + TensorVector.ones(2, exact=False)
    with pytest.raises(ValueError):
        TensorVector(np.zeros((2, 3, 2)))
