"""Explicit constructors: uniform matroids, graphs, wheels, grafts and friends."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .algebra import Ring
from .matroid import LinearMatroid, MatroidError, from_matrix

# the six orderings of {2, 3, 4}; coordinate i of a product-ring line uses ordering i
_ORDERINGS = sorted(itertools.permutations((2, 3, 4)))


def _labels(labels, n):
    if labels is None:
        return [str(i) for i in range(n)]
    labels = [str(x) for x in labels]
    if len(labels) != n:
        raise MatroidError(f"need {n} labels, got {len(labels)}")
    return labels


def uniform(r: int, n: int, ring: Ring = Ring.GF5, labels=None) -> LinearMatroid:
    """U_{r,n}; over GF(5)^6 rank-2 and corank-2 cases use the six orderings of {2,3,4}."""
    if not 0 <= r <= n:
        raise MatroidError(f"need 0 <= r <= n, got r={r}, n={n}")
    labels = _labels(labels, n)
    c = n - r
    if r == 0 or c == 0 or r == 1 or c == 1:
        A = np.ones((ring.width, r, c), dtype=np.int64)
        if c == 1:
            A = np.ones((ring.width, r, 1), dtype=np.int64)
        return LinearMatroid(ring, A, labels)
    if ring is Ring.GF2:
        raise MatroidError(f"U_{{{r},{n}}} is not binary")
    if n > 6:
        raise MatroidError(f"U_{{{r},{n}}} is not representable over GF(5)")
    if ring is Ring.GF5x6 and r == 2:
        A = np.ones((6, 2, c), dtype=np.int64)
        for i, order in enumerate(_ORDERINGS):
            A[i, 1, 1:] = order[: c - 1]
        return LinearMatroid(ring, A, labels)
    if ring is Ring.GF5x6 and c == 2:
        D = uniform(c, n, ring, labels[r:] + labels[:r]).dual()
        return D
    # normal rational curve (1, x, ..., x^{r-1}) plus the point at infinity
    pts = [[pow(x, k, 5) for k in range(r)] for x in range(5)] + [[0] * (r - 1) + [1]]
    cols = np.array(pts[:n], dtype=np.int64).T
    M = LinearMatroid.from_columns(Ring.GF5, cols, labels)
    return M.lift(ring) if ring is Ring.GF5x6 else M


def canonical_u25() -> LinearMatroid:
    """The product-ring U_{2,5} on {a,..,e}: columns a,b basis, c,d,e on the line."""
    return uniform(2, 5, Ring.GF5x6, labels="abcde")


@dataclass
class Graph:
    vertices: list
    edges: list = field(default_factory=list)  # (u, v, label)

    def __post_init__(self):
        vs = set(self.vertices)
        labels = [str(e[2]) for e in self.edges]
        if len(set(labels)) != len(labels):
            raise MatroidError("edge labels must be distinct")
        for u, v, _ in self.edges:
            if u not in vs or v not in vs:
                raise MatroidError(f"edge endpoint not a vertex: {(u, v)}")

    def components(self) -> list[list]:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in self.edges:
            parent[find(u)] = find(v)
        comps: dict = {}
        for v in self.vertices:
            comps.setdefault(find(v), []).append(v)
        return list(comps.values())


@dataclass
class Graft:
    graph: Graph
    T: list
    label: Hashable = "g"

    def __post_init__(self):
        if not self.T:
            raise MatroidError("graft vertex set T must be nonempty")
        if str(self.label) in {str(e[2]) for e in self.graph.edges}:
            raise MatroidError("graft label collides with an edge label")


def _incidence(G: Graph, signed: bool) -> np.ndarray:
    pos = {v: i for i, v in enumerate(G.vertices)}
    A = np.zeros((len(G.vertices), len(G.edges)), dtype=np.int64)
    for j, (u, v, _) in enumerate(G.edges):
        if u == v:
            continue
        A[pos[u], j] += 1
        A[pos[v], j] += -1 if signed else 1
    return A


def _drop_rows(G: Graph) -> list[int]:
    pos = {v: i for i, v in enumerate(G.vertices)}
    dropped = {pos[c[0]] for c in G.components()}
    return [i for i in range(len(G.vertices)) if i not in dropped]


def graphic(G: Graph, ring: Ring = Ring.GF2) -> LinearMatroid:
    """Cycle matroid from the signed incidence matrix (regular, so valid in every ring)."""
    A = _incidence(G, signed=True)[_drop_rows(G)] % ring.p
    cols = np.repeat(A[None], ring.width, axis=0)
    labels = [str(e[2]) for e in G.edges]
    if A.shape[0] == 0:
        return LinearMatroid(ring, np.zeros((ring.width, 0, len(labels)), dtype=np.int64), labels)
    return LinearMatroid.from_columns(ring, cols, labels)


def graft(g: Graft) -> LinearMatroid:
    G = g.graph
    if len(G.components()) != 1:
        raise MatroidError("graft needs a connected graph")
    A = _incidence(G, signed=False) % 2
    t = np.array([[1 if v in set(g.T) else 0] for v in G.vertices], dtype=np.int64)
    rows = _drop_rows(G)
    cols = np.hstack([A, t])[rows]
    labels = [str(e[2]) for e in G.edges] + [str(g.label)]
    return LinearMatroid.from_columns(Ring.GF2, cols[None], labels)


def complete_graph(k: int) -> Graph:
    vs = list(range(k))
    edges = [(i, j, f"e{i}{j}") for i, j in itertools.combinations(vs, 2)]
    return Graph(vs, edges)


def wheel_graph(n: int) -> Graph:
    if n < 2:
        raise MatroidError("wheels have rank at least 2")
    vs = ["h"] + [f"v{i}" for i in range(n)]
    edges = [("h", f"v{i}", f"s{i}") for i in range(n)]
    edges += [(f"v{i}", f"v{(i + 1) % n}", f"r{i}") for i in range(n)]
    return Graph(vs, edges)


def wheel(n: int, ring: Ring = Ring.GF2) -> tuple[LinearMatroid, list[str], list[str]]:
    """Rank-n wheel with spokes s0.. and rims r0..; {s_i, r_i, s_(i+1)} are triangles."""
    M = graphic(wheel_graph(n), ring)
    return M, [f"s{i}" for i in range(n)], [f"r{i}" for i in range(n)]


def fano(labels: Sequence = None) -> LinearMatroid:
    A = [[1, 1, 0, 1], [1, 0, 1, 1], [0, 1, 1, 1]]
    return from_matrix(Ring.GF2, A, _labels(labels, 7))


def r10(labels: Sequence = None) -> LinearMatroid:
    base = [1, 1, 0, 0, 1]
    A = [base[-i:] + base[:-i] for i in range(5)]
    return from_matrix(Ring.GF2, A, _labels(labels, 10))


def p6() -> LinearMatroid:
    """Rank 3, six points, exactly one three-point line."""
    cols = np.array([[1, 0, 0, 1, 1, 1], [0, 1, 0, 1, 2, 3], [0, 0, 1, 0, 1, 3]])
    return LinearMatroid.from_columns(Ring.GF5, cols, range(6))


def q6() -> LinearMatroid:
    """Rank 3, six points, two three-point lines meeting in a point."""
    cols = np.array([[1, 0, 0, 1, 1, 1], [0, 1, 0, 1, 0, 2], [0, 0, 1, 0, 1, 3]])
    return LinearMatroid.from_columns(Ring.GF5, cols, range(6))
