import functools

import numpy as np
import pytest

from tdcube.graphs import build_named
from tdcube.spectral import spectral_data


@functools.lru_cache(maxsize=None)
def graph(name):
    return build_named(name)


@functools.lru_cache(maxsize=None)
def sdata(name, mode="auto"):
    return spectral_data(graph(name), mode=mode)


@functools.lru_cache(maxsize=None)
def lam(name, mode="auto"):
    from tdcube.fundamental import generate_lambda

    return generate_lambda(sdata(name, mode))


def float_idempotents(adj):
    """Oracle: primitive idempotents from a dense symmetric eigensolver, decreasing eigenvalues."""
    w, V = np.linalg.eigh(np.asarray(adj, dtype=float))
    theta = sorted({round(float(x), 6) for x in w}, reverse=True)
    out = []
    for t in theta:
        cols = V[:, np.abs(w - t) < 1e-6]
        out.append(cols @ cols.T)
    return theta, out


@pytest.fixture
def sd_factory():
    return sdata
