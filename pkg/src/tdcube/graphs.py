"""Distance-regular graphs: construction, ingestion and validation."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

__all__ = [
    "Graph",
    "NotDistanceRegular",
    "build_hamming",
    "build_complete",
    "build_named",
    "build_from_edges",
    "load_graph_file",
    "resolve_graph",
    "verify_distance_regular",
]


class NotDistanceRegular(ValueError):
    """Raised when a graph fails the exhaustive distance-regularity check.

    ``witness`` holds ``(x, y, h, i, j, expected, found)``: the pair ``(x, y)``
    at distance ``h`` has ``found`` vertices at distances ``(i, j)`` from it,
    while the first pair at distance ``h`` had ``expected``.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True, eq=False)
class Graph:
    """An immutable distance-regular graph with its intersection numbers.

    ``intersection[h, i, j]`` is p^h_{i,j}.  ``labels`` carries vertex
    coordinates for Hamming graphs and is ``None`` otherwise.
    """

    name: str
    dist: np.ndarray
    intersection: np.ndarray
    labels: tuple | None = None
    hamming: tuple[int, int] | None = None
    degraded: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def diameter(self) -> int:
        return self.intersection.shape[0] - 1

    @property
    def valencies(self) -> tuple[int, ...]:
        return tuple(int(self.intersection[0, i, i]) for i in range(self.diameter + 1))

    @property
    def adjacency(self) -> np.ndarray:
        if "adj" not in self._cache:
            a = (self.dist == 1).astype(np.int64)
            a.setflags(write=False)
            self._cache["adj"] = a
        return self._cache["adj"]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            np.array_equal(self.dist, other.dist)
            and np.array_equal(self.intersection, other.intersection)
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.n, self.dist.tobytes()))

    def summary(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "diameter": self.diameter,
            "valencies": list(self.valencies),
            "intersection_numbers": self.intersection.tolist(),
        }


def verify_distance_regular(dist) -> np.ndarray:
    """Exhaustively check distance-regularity and return p^h_{i,j}.

    For every pair (x, y) the count |Gamma_i(x) & Gamma_j(y)| is read off the
    product of distance-indicator matrices and compared with the first pair
    at the same distance.

    Raises
    ------
    NotDistanceRegular
        With the first violating pair in row-major order.
    """
    dist = np.asarray(dist, dtype=np.int64)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1] or dist.shape[0] == 0:
        raise ValueError("distance matrix must be square and non-empty")
    if not np.array_equal(dist, dist.T) or np.any(np.diag(dist) != 0) or np.any(dist < 0):
        raise ValueError("distance matrix must be symmetric, nonnegative, zero on the diagonal")
    D = int(dist.max())
    ind = [(dist == i).astype(np.int64) for i in range(D + 1)]
    # first pair at each distance, row-major
    ref = []
    for h in range(D + 1):
        xs, ys = np.nonzero(dist == h)
        ref.append((int(xs[0]), int(ys[0])))
    p = np.zeros((D + 1, D + 1, D + 1), dtype=np.int64)
    for i in range(D + 1):
        for j in range(D + 1):
            counts = ind[i] @ ind[j]
            for h in range(D + 1):
                x0, y0 = ref[h]
                expected = counts[x0, y0]
                bad = np.nonzero((dist == h) & (counts != expected))
                if bad[0].size:
                    x, y = int(bad[0][0]), int(bad[1][0])
                    witness = (x, y, h, i, j, int(expected), int(counts[x, y]))
                    raise NotDistanceRegular(
                        f"not distance-regular: pair ({x},{y}) at distance {h} has "
                        f"{counts[x, y]} vertices at distances ({i},{j}), pair "
                        f"({x0},{y0}) has {expected}",
                        witness,
                    )
                p[h, i, j] = expected
    return p


def _make(name, dist, labels=None, hamming=None, degraded=False) -> Graph:
    dist = np.ascontiguousarray(dist, dtype=np.int64)
    p = verify_distance_regular(dist)
    dist.setflags(write=False)
    p.setflags(write=False)
    return Graph(name, dist, p, labels, hamming, degraded)


def build_hamming(D: int, N: int) -> Graph:
    """The Hamming graph H(D, N) on D-tuples over {1..N}, lexicographic order.

    N = 2 (the hypercube) is built but flagged ``degraded``; the profile
    calculus refuses it.
    """
    if D < 1:
        raise ValueError(f"Hamming graph needs D >= 1, got {D}")
    if N < 2:
        raise ValueError(f"Hamming graph needs N >= 2, got {N}")
    labels = tuple(itertools.product(range(1, N + 1), repeat=D))
    coords = np.array(labels, dtype=np.int64)
    dist = (coords[:, None, :] != coords[None, :, :]).sum(axis=2)
    return _make(f"hamming:{D},{N}", dist, labels, (D, N), degraded=(N == 2))


def build_complete(N: int) -> Graph:
    """K_N, identical to H(1, N)."""
    if N < 3:
        raise ValueError(f"complete graph needs N >= 3, got {N}")
    return build_hamming(1, N)


def _petersen() -> Graph:
    pairs = list(itertools.combinations(range(5), 2))
    edges = [(a, b) for a, b in itertools.combinations(range(10), 2) if not set(pairs[a]) & set(pairs[b])]
    return build_from_edges(10, edges, name="petersen")


def _cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError(f"cycle needs n >= 3, got {n}")
    return build_from_edges(n, [(v, (v + 1) % n) for v in range(n)], name=f"cycle:{n}")


def _ints(text: str, count: int, name: str) -> list[int]:
    parts = text.split(",")
    if len(parts) != count:
        raise ValueError(f"{name} expects {count} integer parameter(s), got {text!r}")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"{name}: invalid integer parameter in {text!r}") from None


def build_named(name: str) -> Graph:
    """Build a graph from a family identifier.

    Accepted: ``petersen``, ``hamming:D,N``, ``complete:N``, ``hypercube:D``,
    ``cycle:n``.
    """
    family, _, params = name.strip().partition(":")
    family = family.lower()
    if family == "petersen" and not params:
        return _petersen()
    if family == "hamming":
        D, N = _ints(params, 2, family)
        return build_hamming(D, N)
    if family == "complete":
        (N,) = _ints(params, 1, family)
        return build_complete(N)
    if family == "hypercube":
        (D,) = _ints(params, 1, family)
        g = build_hamming(D, 2)
        return Graph(f"hypercube:{D}", g.dist, g.intersection, g.labels, g.hamming, True)
    if family == "cycle":
        (n,) = _ints(params, 1, family)
        return _cycle(n)
    raise ValueError(f"unknown graph family {name!r}")


def build_from_edges(n: int, edges, name: str = "edges") -> Graph:
    """Graph from an undirected edge list on vertices ``0..n-1``.

    Distances come from breadth-first search; the result is then checked for
    distance-regularity.
    """
    if n < 1:
        raise ValueError("vertex count must be positive")
    rows, cols = [], []
    for e in edges:
        a, b = (int(v) for v in e)
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"edge {tuple(e)} references a vertex outside 0..{n - 1}")
        if a == b:
            raise ValueError(f"self-loop at vertex {a}")
        rows += [a, b]
        cols += [b, a]
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    adj.data[:] = 1.0  # duplicate edges collapse
    d = shortest_path(adj, method="D", unweighted=True)
    if np.isinf(d).any():
        raise NotDistanceRegular("graph is disconnected")
    return _make(name, d.astype(np.int64))


def load_graph_file(path) -> Graph:
    """Read ``{"n": ..., "edges": [[i, j], ...]}`` (0-based) from a JSON file."""
    path = Path(path)
    doc = json.loads(path.read_text())
    if not isinstance(doc, dict) or "n" not in doc or "edges" not in doc:
        raise ValueError(f"{path}: graph file needs fields 'n' and 'edges'")
    return build_from_edges(int(doc["n"]), doc["edges"], name=path.name)


def resolve_graph(spec: str) -> Graph:
    """A family identifier, or a path to a graph file."""
    if Path(spec).is_file():
        return load_graph_file(spec)
    return build_named(spec)
