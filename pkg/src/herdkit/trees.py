"""Single-leader herdability on undirected trees, and diagonal pairs.

For a symmetric ``A`` whose graph is a tree and ``B = e_leader``:

* :func:`prop5_check` is sufficient at any depth: edges between consecutive
  distance layers share one sign per layer;
* :func:`prop6_check` is exact at depth 1 (a star): herdable iff all edges
  share one sign;
* :func:`prop7_check` is exact at depth 2, through the diagonal pair
  ``(A23 A32, A21)`` and :func:`diagonal_pair_herdable`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ArgumentError, CoverageError, DepthError, NotATreeError, StructureError, ZeroGammaError
from .graph import LayerDecomposition, SignedGraph, graph_from_matrix, layer_decomposition, out_neighborhoods
from .leaders import LeaderFollowerSystem, corollary2_check, lift_certificate, prop2_check
from .linalg import (
    SignClass,
    as_matrix,
    as_vector,
    controllability_matrix,
    is_exact,
    permute,
    resolve_eps,
    sign_class,
    solve_consistent,
)
from .oracle import HerdabilityVerdict, Status, herdable, verify_certificate, verify_witness
from .unisign import is_unisigned

REL_TOL = 1e-9


def same_value(a, b) -> bool:
    """Equality used for eigenvalue / square-sum ties: exact, or relative 1e-9 for floats."""
    if isinstance(a, float) or isinstance(b, float):
        a, b = float(a), float(b)
        return abs(a - b) <= REL_TOL * max(1.0, abs(a), abs(b))
    return a == b


@dataclass(frozen=True)
class TreeSystem:
    """A tree with a chosen leader.

    ``A`` and ``layers`` use the caller's node indices; ``system`` is the same
    pair relabeled so the leader is node 0 and layers are contiguous.
    """

    A: np.ndarray
    leader: int
    layers: LayerDecomposition
    graph: SignedGraph
    system: LeaderFollowerSystem

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def depth(self) -> int:
        return self.layers.depth

    def input_matrix(self) -> np.ndarray:
        e = [[1 if i == self.leader else 0] for i in range(self.n)]
        return as_matrix(e, exact=is_exact(self.A))

    def parent_weight(self, v: int):
        """Weight of the edge joining ``v`` to its neighbour one layer closer to the leader."""
        level = {u: k for k, layer in enumerate(self.layers.layers, start=1) for u in layer}
        level[self.leader] = 0
        for u, w in self.graph.successors(v):
            if level[u] == level[v] - 1:
                return u, w
        raise StructureError(f"node {v} has no parent")


def _tree_graph(A, eps) -> SignedGraph:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ArgumentError(f"A must be square, got {A.shape}")
    G = graph_from_matrix(A, directed=False, eps=eps)
    if any(s == d for s, d, _ in G.edges):
        raise NotATreeError("self-loops are cycles; a tree has a zero diagonal")
    if G.edge_count() != G.n - 1:
        raise NotATreeError(f"a tree on {G.n} nodes has {G.n - 1} edges, found {G.edge_count()}")
    try:
        layer_decomposition(G, [0])
    except CoverageError as exc:
        raise NotATreeError("graph is disconnected") from exc
    return G


def validate_tree(A, leader: int = 0, eps: float | None = None) -> TreeSystem:
    A = as_matrix(A)
    tol = resolve_eps(eps)
    G = _tree_graph(A, tol)
    n = G.n
    if n < 2:
        raise ArgumentError("a tree system needs at least one follower")
    if not 0 <= int(leader) < n:
        raise ArgumentError(f"leader {leader} out of range")
    leader = int(leader)
    dec = layer_decomposition(G, [leader])
    perm = dec.order()
    pos = {v: i for i, v in enumerate(perm)}
    norm_layers = LayerDecomposition((0,), tuple(tuple(sorted(pos[v] for v in layer)) for layer in dec.layers))
    system = LeaderFollowerSystem(permute(A, perm, perm), 1, norm_layers, tuple(perm))
    return TreeSystem(A, leader, dec, G, system)


def prop5_check(T: TreeSystem, eps: float | None = None) -> HerdabilityVerdict:
    """Herdable if, layer by layer, all edges into the next layer share one sign."""
    tol = resolve_eps(eps)
    layer_signs = []
    for k, layer in enumerate(T.layers.layers):
        s = is_unisigned([T.parent_weight(v)[1] for v in layer], tol)
        if s is None:
            return HerdabilityVerdict.unknown(check="tree_layer_signs", failing_layer=k)
        layer_signs.append(int(s))
    v = prop2_check(T.system, tol)
    if not v.is_herdable:
        raise StructureError("layer-uniform tree rejected by the layered cover test")
    return HerdabilityVerdict(
        Status.HERDABLE,
        certificate=v.certificate,
        details={"check": "tree_layer_signs", "edge_signs": layer_signs},
    )


def select_leader(A, eps: float | None = None):
    """First node (ascending) from which every layer expansion is sign-uniform.

    Returns ``(leader, verdict)`` or None when no node qualifies.
    """
    tol = resolve_eps(eps)
    G = _tree_graph(A, tol)
    for i in range(G.n):
        covered = {i}
        ok = True
        while len(covered) < G.n:
            out, pos, neg = out_neighborhoods(G, covered, tol)
            if not out:
                raise StructureError("frontier stalled on a connected tree")
            if pos != out and neg != out:
                ok = False
                break
            covered |= out
        if ok:
            verdict = prop5_check(validate_tree(A, i, tol), tol)
            return i, verdict
    return None


def _star_gamma(T: TreeSystem):
    layer = T.layers.layers[0]
    return layer, [T.A[v, T.leader] for v in layer]


def _pair_witness(T: TreeSystem, i: int, j: int, gi, gj) -> np.ndarray:
    """``[Gamma]_j e_i - [Gamma]_i e_j``, sign-normalized to be nonnegative."""
    w = [0] * T.n
    w[i], w[j] = gj, -gi
    if sign_class(gj) == SignClass.NEGATIVE:
        w = [-x for x in w]
    return as_vector(w, exact=is_exact(T.A))


def prop6_check(T: TreeSystem, eps: float | None = None) -> HerdabilityVerdict:
    """Depth-1 trees: herdable iff every edge has the same sign."""
    tol = resolve_eps(eps)
    if T.depth != 1:
        raise DepthError(f"expected depth 1, got {T.depth}")
    layer, gamma = _star_gamma(T)
    if is_unisigned(gamma, tol) is not None:
        v = corollary2_check(T.system.A, 1, tol)
        return HerdabilityVerdict(Status.HERDABLE, certificate=v.certificate, details={"check": "star_signs"})
    a = next(p for p, g in enumerate(gamma) if sign_class(g, tol) == SignClass.POSITIVE)
    b = next(p for p, g in enumerate(gamma) if sign_class(g, tol) == SignClass.NEGATIVE)
    i, j = sorted((layer[a], layer[b]))
    w = _pair_witness(T, i, j, T.A[i, T.leader], T.A[j, T.leader])
    _check_witness(T, w)
    return HerdabilityVerdict(
        Status.NOT_HERDABLE, witness=w, details={"check": "star_signs", "violating_pair": [i, j]}
    )


def _check_witness(T: TreeSystem, w) -> None:
    R = controllability_matrix(T.A, T.input_matrix(), T.n)
    if not verify_witness(R, w):
        raise StructureError("constructed witness is not orthogonal to the reachable space")


def _square_sums(T: TreeSystem):
    f1 = T.layers.layers[0]
    kids = {i: [] for i in f1}
    for v in T.layers.layers[1]:
        parent, w = T.parent_weight(v)
        kids[parent].append(w)
    return f1, kids, {i: sum(w * w for w in kids[i]) for i in f1}


def prop7_check(T: TreeSystem, eps: float | None = None) -> HerdabilityVerdict:
    """Depth-2 trees: exact test over pairs of first-layer nodes with tied square sums.

    For every pair ``i, j`` (including ``i == j``) whose child-edge square sums
    coincide, the leader edges to ``i`` and ``j`` must share a sign and the
    child edges of ``i`` and ``j`` together must be zero or unisigned.
    """
    tol = resolve_eps(eps)
    if T.depth > 2:
        raise DepthError(f"expected depth at most 2, got {T.depth}")
    if T.depth == 1:
        return prop6_check(T, tol)
    f1, kids, lam = _square_sums(T)
    gamma = {i: T.A[i, T.leader] for i in f1}

    for i in f1:
        if kids[i] and is_unisigned(kids[i], tol) is None:
            return _prop7_reject(T, tol, (i, i), "children of one node have mixed signs")
    sign_clash = None
    union_clash = None
    for a, i in enumerate(f1):
        for j in f1[a + 1:]:
            if not same_value(lam[i], lam[j]):
                continue
            if sign_class(gamma[i] * gamma[j], tol) != SignClass.POSITIVE and sign_clash is None:
                sign_clash = (i, j)
            both = kids[i] + kids[j]
            if both and is_unisigned(both, tol) is None and union_clash is None:
                union_clash = (i, j)
    if sign_clash is not None:
        i, j = sign_clash
        w = _pair_witness(T, i, j, gamma[i], gamma[j])
        _check_witness(T, w)
        return HerdabilityVerdict(
            Status.NOT_HERDABLE,
            witness=w,
            details={"check": "depth2_ties", "violating_pair": [i, j], "reason": "leader edges differ in sign"},
        )
    if union_clash is not None:
        return _prop7_reject(T, tol, union_clash, "tied nodes have children of opposite signs")

    cert, source = _depth2_certificate(T, f1, kids, lam, gamma, tol)
    return HerdabilityVerdict(
        Status.HERDABLE, certificate=cert, details={"check": "depth2_ties", "certificate_source": source}
    )


def _prop7_reject(T: TreeSystem, tol, pair, reason) -> HerdabilityVerdict:
    oracle = herdable(T.A, T.input_matrix(), tol)
    return HerdabilityVerdict(
        Status.NOT_HERDABLE,
        witness=oracle.witness,
        details={"check": "depth2_ties", "violating_pair": list(pair), "reason": reason},
    )


def _group(values) -> list[list[int]]:
    groups: list[list[int]] = []
    for idx, v in enumerate(values):
        for g in groups:
            if same_value(values[g[0]], v):
                g.append(idx)
                break
        else:
            groups.append([idx])
    return groups


def _vandermonde_solve(nodes, targets, ncols, exact, tol):
    """Coefficients ``u`` (length ncols) with ``sum_t u_t * node^t == target`` for each node."""
    V = [[lam**t for t in range(ncols)] for lam in nodes]
    return solve_consistent(as_matrix(V, exact=exact), as_matrix([[t] for t in targets], exact=exact), tol)


def _unit_target(sign, entries, exact):
    """Signed scale ``c`` so that ``|e| * c >= 1`` for every nonzero entry ``e``."""
    low = min(abs(e) for e in entries)
    return sign * (Fraction(1) / Fraction(low) if exact else 1.0 / float(low))


def _depth2_certificate(T: TreeSystem, f1, kids, lam, gamma, tol):
    """Certificate from the grouped factorization, lifted from the follower pair.

    Even columns of the follower controllability matrix only reach layer 1
    and odd columns only layer 2, so both halves are solved independently
    as Vandermonde systems over the distinct square sums.
    """
    exact = is_exact(T.A)
    n = T.n
    order = list(f1)
    lam_list = [lam[i] for i in order]
    groups = _group(lam_list)
    nodes = [lam_list[g[0]] for g in groups]
    even_targets = []
    for g in groups:
        gs = [gamma[order[p]] for p in g]
        even_targets.append(_unit_target(int(sign_class(gs[0], tol)), gs, exact))
    odd_nodes, odd_targets = [], []
    for g, node in zip(groups, nodes):
        weighted = [gamma[order[p]] * w for p in g for w in kids[order[p]]]
        if not weighted:
            continue
        odd_nodes.append(node)
        odd_targets.append(_unit_target(int(is_unisigned(weighted, tol)), weighted, exact))
    n_red = n - 1
    n_even = (n_red + 1) // 2
    n_odd = n_red // 2
    try:
        ue = _vandermonde_solve(nodes, even_targets, n_even, exact, tol)
        uo = _vandermonde_solve(odd_nodes, odd_targets, n_odd, exact, tol) if odd_nodes else [0] * n_odd
        z = [0] * n_red
        z[0::2] = list(ue)
        z[1::2] = list(uo)
        cert = lift_certificate(T.system.A, 1, z, tol)
        R = controllability_matrix(T.A, T.input_matrix(), n)
        if verify_certificate(R, cert):
            return cert, "vandermonde"
    except (ArithmeticError, ValueError, StructureError):
        pass
    oracle = herdable(T.A, T.input_matrix(), tol)
    if not oracle.is_herdable:
        raise StructureError("depth-2 conditions hold but the oracle disagrees")
    return oracle.certificate, "oracle"


@dataclass(frozen=True)
class DiagonalPair:
    """``Lambda = diag(lambdas)`` with input column ``gamma`` (no zero entries)."""

    lambdas: np.ndarray
    gamma: np.ndarray

    def __init__(self, lambdas, gamma, eps: float | None = None):
        lam = as_vector(lambdas)
        gam = as_vector(gamma)
        if lam.shape != gam.shape:
            raise ArgumentError("lambdas and gamma must have the same length")
        tol = resolve_eps(eps)
        zeros = [i for i, g in enumerate(gam) if sign_class(g, tol) == SignClass.ZERO]
        if zeros:
            raise ZeroGammaError(f"gamma has zero entries at {zeros}")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "gamma", gam)

    @property
    def n(self) -> int:
        return self.lambdas.shape[0]

    @property
    def exact(self) -> bool:
        return is_exact(self.lambdas) and is_exact(self.gamma)

    def matrices(self):
        n = self.n
        L = [[self.lambdas[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return as_matrix(L, exact=self.exact), as_matrix(list(self.gamma), exact=self.exact)

    def controllability_matrix(self) -> np.ndarray:
        L, G = self.matrices()
        return controllability_matrix(L, G, self.n)


def vandermonde_factorization(P: DiagonalPair):
    """``(D, V, groups)`` with ``R(Lambda, Gamma) == D @ V``.

    ``D`` is n x s with column h holding the gamma entries of eigenvalue
    group h; ``V`` is the s x n Vandermonde matrix of the group eigenvalues.
    """
    lam = list(P.lambdas)
    groups = _group(lam)
    D = [[P.gamma[i] if i in g else 0 for g in groups] for i in range(P.n)]
    V = [[lam[g[0]] ** t for t in range(P.n)] for g in groups]
    return as_matrix(D, exact=P.exact), as_matrix(V, exact=P.exact), groups


def diagonal_pair_herdable(P: DiagonalPair, eps: float | None = None) -> HerdabilityVerdict:
    """Herdable iff equal eigenvalues always carry same-signed gamma entries."""
    tol = resolve_eps(eps)
    lam, gam = list(P.lambdas), list(P.gamma)
    groups = _group(lam)
    for g in groups:
        for a, i in enumerate(g):
            for j in g[a + 1:]:
                if sign_class(gam[i], tol) != sign_class(gam[j], tol):
                    w = [0] * P.n
                    w[i], w[j] = gam[j], -gam[i]
                    if sign_class(gam[j], tol) == SignClass.NEGATIVE:
                        w = [-x for x in w]
                    return HerdabilityVerdict(
                        Status.NOT_HERDABLE,
                        witness=as_vector(w, exact=P.exact),
                        details={"check": "diagonal_pair", "violating_pair": [i, j]},
                    )
    nodes = [lam[g[0]] for g in groups]
    targets = [_unit_target(int(sign_class(gam[g[0]], tol)), [gam[i] for i in g], P.exact) for g in groups]
    u = _vandermonde_solve(nodes, targets, P.n, P.exact, tol)
    R = P.controllability_matrix()
    if not verify_certificate(R, u):
        raise StructureError("Vandermonde certificate failed verification (ill-conditioned eigenvalues?)")
    return HerdabilityVerdict(
        Status.HERDABLE, certificate=u, details={"check": "diagonal_pair", "groups": groups}
    )
