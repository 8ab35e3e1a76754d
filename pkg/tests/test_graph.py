import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from herdkit.errors import ArgumentError, CoverageError, SymmetryError
from herdkit.graph import (
    distances_from_set,
    graph_from_matrix,
    is_strongly_connected,
    layer_decomposition,
    out_neighborhoods,
    structural_balance_partition,
)

PATH3 = [[0, 1, 0], [1, 0, 1], [0, 1, 0]]


def test_graph_from_matrix_examples():
    assert graph_from_matrix([[0, 0], [0, 0]]).edges == ()
    G = graph_from_matrix([[0, 1], [0, 0]])
    assert G.edges == ((1, 0, 1),)  # arc 2 -> 1 in 1-based terms
    G = graph_from_matrix([[0, 2], [2, 0]], directed=False)
    assert G.edges == ((0, 1, 2),)
    with pytest.raises(SymmetryError):
        graph_from_matrix([[0, 1], [2, 0]], directed=False)


def test_distances_examples():
    G = graph_from_matrix(PATH3, directed=False)
    assert distances_from_set(G, {0}) == {0: 0, 1: 1, 2: 2}
    assert distances_from_set(G, {0, 2}) == {0: 0, 1: 1, 2: 0}
    A = [[0, 1, 0, 0], [1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 0]]
    assert distances_from_set(graph_from_matrix(A), {0})[3] is None
    with pytest.raises(ArgumentError):
        distances_from_set(G, set())


def test_layer_examples():
    star = [[0, 1, 1, 1], [1, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0]]
    dec = layer_decomposition(graph_from_matrix(star, directed=False), [0])
    assert dec.layers == ((1, 2, 3),) and dec.depth == 1
    dec = layer_decomposition(graph_from_matrix(PATH3, directed=False), [0])
    assert dec.layers == ((1,), (2,)) and dec.depth == 2
    dec = layer_decomposition(graph_from_matrix(PATH3, directed=False), [0, 1, 2])
    assert dec.depth == 0 and dec.layers == ()
    with pytest.raises(CoverageError):
        layer_decomposition(graph_from_matrix([[0, 0], [0, 0]]), [0])


def test_out_neighborhood_examples():
    A = [[0, 0, 0, 0], [3, 0, 0, 0], [-1, 0, 0, 0], [1, 0, -1, 0]]
    G = graph_from_matrix(A)
    assert out_neighborhoods(G, {0}) == ({1, 2, 3}, {1, 3}, {2})
    assert out_neighborhoods(G, {1}) == (set(), set(), set())
    out, pos, neg = out_neighborhoods(G, {0, 2})
    assert 3 in pos and 3 in neg and 2 not in out


def test_strong_connectivity_examples():
    assert is_strongly_connected(graph_from_matrix([[0, 1], [1, 0]]))
    assert not is_strongly_connected(graph_from_matrix([[0, 0], [1, 0]]))
    assert is_strongly_connected(graph_from_matrix([[0, 0, 1], [1, 0, 0], [0, 1, 0]]))


def test_balance_examples():
    assert structural_balance_partition(graph_from_matrix([[0, -1], [-1, 0]])) == ({0}, {1})
    tri = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    assert structural_balance_partition(graph_from_matrix(tri)) == ({0, 1, 2}, frozenset())
    tri[0][1] = tri[1][0] = -1
    assert structural_balance_partition(graph_from_matrix(tri)) is None
    assert structural_balance_partition(graph_from_matrix([[-1]])) is None


def digraphs(max_n=5):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(
            st.lists(st.sampled_from([0, 0, 0, 1, -1, 2]), min_size=n, max_size=n), min_size=n, max_size=n
        )
    )


@settings(max_examples=100, deadline=None)
@given(digraphs(), st.data())
def test_distances_match_matrix_powers(A, data):
    n = len(A)
    src = data.draw(st.integers(0, n - 1))
    dist = distances_from_set(graph_from_matrix(A), {src})
    P = (np.array(A, dtype=object) != 0).astype(object)
    walk = np.eye(n, dtype=object)
    first = {src: 0}
    for k in range(1, n):
        walk = P.dot(walk)
        for j in range(n):
            if walk[j, src] != 0 and j not in first:
                first[j] = k
    assert dist == {j: first.get(j) for j in range(n)}


def _balanced_by_cycles(A):
    """Every cycle of the underlying undirected multigraph has an even number of negative edges."""
    n = len(A)
    if any(A[i][i] < 0 for i in range(n)):
        return False
    g = nx.Graph()
    g.add_nodes_from(range(n))
    sign = {}
    for i, j in itertools.combinations(range(n), 2):
        s = {int(np.sign(A[i][j])), int(np.sign(A[j][i]))} - {0}
        if len(s) == 2:
            return False  # a 2-cycle with one positive and one negative arc
        if s:
            g.add_edge(i, j)
            sign[frozenset((i, j))] = s.pop()
    for cycle in nx.cycle_basis(g):
        negs = sum(sign[frozenset((cycle[k], cycle[(k + 1) % len(cycle)]))] < 0 for k in range(len(cycle)))
        if negs % 2:
            return False
    return True


@settings(max_examples=200, deadline=None)
@given(digraphs(5))
def test_balance_iff_even_negative_cycles(A):
    parts = structural_balance_partition(graph_from_matrix(A))
    assert (parts is not None) == _balanced_by_cycles(A)
    if parts is not None:
        v1, v2 = parts
        assert v1 | v2 == set(range(len(A))) and not v1 & v2
        for i in range(len(A)):
            for j in range(len(A)):
                if A[i][j] and i != j:
                    same = (i in v1) == (j in v1)
                    assert (A[i][j] > 0) == same


@settings(max_examples=100, deadline=None)
@given(digraphs(6), st.data())
def test_layers_are_bfs_frontiers(A, data):
    n = len(A)
    leaders = data.draw(st.sets(st.integers(0, n - 1), min_size=1))
    G = graph_from_matrix(A)
    dist = distances_from_set(G, leaders)
    reachable = {v for v, d in dist.items() if d is not None}
    if len(reachable) < n:
        with pytest.raises(CoverageError):
            layer_decomposition(G, leaders)
        return
    dec = layer_decomposition(G, leaders)
    covered = set(leaders).union(*map(set, dec.layers))
    assert covered == reachable
    for k, layer in enumerate(dec.layers, start=1):
        assert all(dist[v] == k for v in layer)
