"""Signed weighted graphs induced by a state matrix.

Arc convention: ``A[i][j] != 0`` means an arc from node ``j`` to node ``i``
with weight ``A[i][j]``.  With this orientation ``(A^k B)[i, l]`` collects the
walks of length k from input node ``l`` to node ``i``.  Node indices are
0-based here; external formats convert at the boundary.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .errors import ArgumentError, CoverageError, SymmetryError
from .linalg import SignClass, as_matrix, resolve_eps, sign_class

ARC_CONVENTION = "A[i][j] != 0 <=> arc j->i with weight A[i][j]"


@dataclass(frozen=True)
class SignedGraph:
    """Graph of a square matrix.

    For undirected graphs each edge is stored once as ``(i, j, w)`` with
    ``i <= j``; for directed graphs edges are arcs ``(src, dst, w)``.
    """

    n: int
    edges: tuple[tuple[int, int, object], ...]
    directed: bool
    _out: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        out: dict[int, list[tuple[int, object]]] = {v: [] for v in range(self.n)}
        for src, dst, w in self.edges:
            out[src].append((dst, w))
            if not self.directed and src != dst:
                out[dst].append((src, w))
        object.__setattr__(self, "_out", out)

    def successors(self, v: int) -> list[tuple[int, object]]:
        """Pairs ``(node, weight)`` reachable from ``v`` by one arc."""
        return self._out[v]

    def edge_count(self) -> int:
        return len(self.edges)


def graph_from_matrix(A, directed: bool = True, eps: float | None = None) -> SignedGraph:
    A = as_matrix(A)
    tol = resolve_eps(eps)
    n = A.shape[0]
    if A.shape[1] != n:
        raise ArgumentError(f"adjacency matrix must be square, got {A.shape}")
    nz = lambda x: sign_class(x, tol) != SignClass.ZERO  # noqa: E731
    if not directed:
        for i in range(n):
            for j in range(i + 1, n):
                if sign_class(A[i, j] - A[j, i], tol) != SignClass.ZERO:
                    raise SymmetryError(f"A[{i}][{j}] != A[{j}][{i}] for an undirected graph")
        edges = tuple((i, j, A[i, j]) for i in range(n) for j in range(i, n) if nz(A[i, j]))
    else:
        edges = tuple(sorted((j, i, A[i, j]) for i in range(n) for j in range(n) if nz(A[i, j])))
    return SignedGraph(n, edges, directed)


def distances_from_set(G: SignedGraph, S: Iterable[int]) -> dict[int, int | None]:
    """Multi-source BFS hop distances; unreachable nodes map to None."""
    sources = sorted(set(S))
    if not sources:
        raise ArgumentError("source set must be nonempty")
    for s in sources:
        if not 0 <= s < G.n:
            raise ArgumentError(f"node {s} out of range")
    dist: dict[int, int | None] = {v: None for v in range(G.n)}
    queue = deque()
    for s in sources:
        dist[s] = 0
        queue.append(s)
    while queue:
        v = queue.popleft()
        for w, _ in G.successors(v):
            if dist[w] is None:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


@dataclass(frozen=True)
class LayerDecomposition:
    leaders: tuple[int, ...]
    layers: tuple[tuple[int, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(layer) for layer in self.layers)

    def order(self) -> list[int]:
        """Leaders then layers, each in ascending index order."""
        out = list(self.leaders)
        for layer in self.layers:
            out.extend(layer)
        return out


def layer_decomposition(G: SignedGraph, L: Iterable[int]) -> LayerDecomposition:
    """Group followers by distance from the leader set; every node must be reachable."""
    leaders = tuple(sorted(set(L)))
    dist = distances_from_set(G, leaders)
    missing = [v for v, d in dist.items() if d is None]
    if missing:
        raise CoverageError(f"nodes {missing} are unreachable from leaders {list(leaders)}")
    depth = max(dist.values())
    layers = tuple(tuple(v for v in range(G.n) if dist[v] == k) for k in range(1, depth + 1))
    return LayerDecomposition(leaders, layers)


def out_neighborhoods(G: SignedGraph, S: Iterable[int], eps: float | None = None):
    """``(Out(S), Out+(S), Out-(S))``, excluding ``S`` itself.

    A node reached from ``S`` by arcs of both signs belongs to both signed sets.
    """
    tol = resolve_eps(eps)
    src = set(S)
    out, pos, neg = set(), set(), set()
    for v in src:
        for w, weight in G.successors(v):
            if w in src:
                continue
            out.add(w)
            if sign_class(weight, tol) == SignClass.POSITIVE:
                pos.add(w)
            else:
                neg.add(w)
    return frozenset(out), frozenset(pos), frozenset(neg)


def is_strongly_connected(G: SignedGraph) -> bool:
    if G.n == 1:
        return True
    g = nx.DiGraph() if G.directed else nx.Graph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from((s, d) for s, d, _ in G.edges)
    if G.directed:
        return nx.is_strongly_connected(g)
    return nx.is_connected(g)


def structural_balance_partition(G: SignedGraph, eps: float | None = None):
    """Two classes with positive edges inside and negative edges across, or None.

    Components are 2-colored independently; in each component the lowest
    node goes to the first class.  Arc direction is ignored.
    """
    tol = resolve_eps(eps)
    nbrs: dict[int, list[tuple[int, int]]] = {v: [] for v in range(G.n)}
    for s, d, w in G.edges:
        sgn = int(sign_class(w, tol))
        if s == d:
            if sgn < 0:
                return None
            continue
        nbrs[s].append((d, sgn))
        nbrs[d].append((s, sgn))
    color: dict[int, int] = {}
    for start in range(G.n):
        if start in color:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w, sgn in nbrs[v]:
                want = color[v] if sgn > 0 else 1 - color[v]
                if w not in color:
                    color[w] = want
                    queue.append(w)
                elif color[w] != want:
                    return None
    v1 = frozenset(v for v, c in color.items() if c == 0)
    v2 = frozenset(v for v, c in color.items() if c == 1)
    return v1, v2
