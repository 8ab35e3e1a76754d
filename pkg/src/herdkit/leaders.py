"""Herdability of leader-follower networks, ``B = [I_m; 0]``.

Leaders are nodes ``0..m-1``.  Followers are grouped by their distance from
the leader set; after a layer-contiguous relabeling, the first K + 1 blocks of
the controllability matrix are block upper triangular with diagonal blocks
``I_m, Phi_1, ..., Phi_K`` where ``Phi_k`` holds the rows of layer k in
``A^k B``.  That structure drives the layered checks below, while
:func:`reduce` gives the exact reduction to the follower pair ``(A22, A21)``.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .errors import PartitionError, StructureError
from .graph import (
    LayerDecomposition,
    graph_from_matrix,
    is_strongly_connected,
    layer_decomposition,
    structural_balance_partition,
)
from .linalg import (
    as_matrix,
    as_vector,
    block_partition,
    coerce,
    controllability_matrix,
    has_zero_row,
    is_exact,
    permute,
    rank,
    resolve_eps,
    solve_consistent,
)
from .oracle import HerdabilityVerdict, Status, herdable, verify_certificate
from .unisign import (
    EliminationStep,
    certified_verdict,
    compose_block_certificates,
    is_unisigned,
    lemma_a_trace,
    lemma_c_trace,
    nonzero_pattern,
)


def leader_input(n: int, m: int, exact: bool = True) -> np.ndarray:
    """The selection matrix ``[I_m; 0]``."""
    B = [[1 if i == j else 0 for j in range(m)] for i in range(n)]
    return as_matrix(B, exact=exact)


@dataclass(frozen=True)
class LeaderFollowerSystem:
    """A leader-follower pair relabeled so that layers are contiguous.

    ``A`` is in the normalized order; ``perm[i]`` is the caller's index of
    normalized node ``i``.  Leaders keep their positions ``0..m-1``.
    """

    A: np.ndarray
    m: int
    layers: LayerDecomposition
    perm: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def B(self) -> np.ndarray:
        return leader_input(self.n, self.m, exact=is_exact(self.A))

    @property
    def is_identity_order(self) -> bool:
        return self.perm == tuple(range(self.n))

    def to_caller_order(self, x) -> list:
        """Map a state-space vector from normalized to caller order."""
        out = [None] * self.n
        for i, p in enumerate(self.perm):
            out[p] = x[i]
        return out


def _check_m(A: np.ndarray, m: int) -> int:
    n = A.shape[0]
    if int(m) != m or not 1 <= m < n:
        raise PartitionError(f"need 1 <= m < n = {n}, got m = {m!r}")
    return int(m)


def validate_assumption1(A, m: int, eps: float | None = None) -> LeaderFollowerSystem:
    """Layer the followers of leaders ``0..m-1`` and relabel them contiguously.

    Raises CoverageError when some follower is unreachable from the leaders.
    """
    A = as_matrix(A)
    m = _check_m(A, m)
    G = graph_from_matrix(A, directed=True, eps=eps)
    dec = layer_decomposition(G, range(m))
    perm = dec.order()
    pos = {v: i for i, v in enumerate(perm)}
    layers = LayerDecomposition(
        tuple(range(m)),
        tuple(tuple(sorted(pos[v] for v in layer)) for layer in dec.layers),
    )
    return LeaderFollowerSystem(permute(A, perm, perm), m, layers, tuple(perm))


def layer_blocks(S: LeaderFollowerSystem, eps: float | None = None, strict: bool = True) -> list[np.ndarray]:
    """``Phi_k``: rows of layer k taken from ``A^k B``, for k = 1..K.

    Signed walks of equal length can cancel, leaving a zero row; ``strict``
    turns that into a StructureError.
    """
    K = S.layers.depth
    if K == 0:
        return []
    R = controllability_matrix(S.A, S.B, K + 1)
    blocks = []
    for k, layer in enumerate(S.layers.layers, start=1):
        phi = R[list(layer), k * S.m:(k + 1) * S.m]
        if strict and has_zero_row(phi, eps) is not None:
            raise StructureError(f"layer {k} block has a zero row; check the zero tolerance")
        blocks.append(as_matrix(phi))
    return blocks


def _layered_check(S: LeaderFollowerSystem, local_trace, name: str, eps) -> HerdabilityVerdict:
    tol = resolve_eps(eps)
    m = S.m
    steps = [EliminationStep(tuple(range(m)), (1,) * m, frozenset(range(m)))]
    for k, (layer, phi) in enumerate(zip(S.layers.layers, layer_blocks(S, tol, strict=False)), start=1):
        if has_zero_row(phi, tol) is not None:
            return HerdabilityVerdict.unknown(check=name, failing_layer=k, reason="layer block has a zero row")
        local = local_trace(phi, tol)
        if local is None:
            return HerdabilityVerdict.unknown(check=name, failing_layer=k)
        for st in local:
            steps.append(
                EliminationStep(
                    tuple(k * m + c for c in st.columns),
                    st.direction,
                    frozenset(layer[r] for r in st.rows),
                )
            )
    R = controllability_matrix(S.A, S.B, S.n)
    return certified_verdict(R, steps, tol, check=name, depth=S.layers.depth)


def prop2_check(S: LeaderFollowerSystem, eps: float | None = None) -> HerdabilityVerdict:
    """Herdable when every layer block has unisigned columns covering all but at most one row."""
    return _layered_check(S, lemma_a_trace, "layer_unisigned_cover", eps)


def prop3_check(S: LeaderFollowerSystem, eps: float | None = None) -> HerdabilityVerdict:
    """Herdable when every layer block passes the two-block sign test."""
    return _layered_check(S, lemma_c_trace, "layer_two_block", eps)


def reduce(A, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Follower pair ``(A22, A21)``; herdable iff ``(A, [I_m; 0])`` is."""
    _, _, A21, A22 = block_partition(A, m)
    return A22, A21


def follower_image_blocks(A, m: int) -> tuple[np.ndarray, np.ndarray]:
    """``([0 I] [AB ... A^(n-1)B], R(A22, A21))``: two matrices with equal images."""
    A = as_matrix(A)
    m = _check_m(A, m)
    n = A.shape[0]
    R = controllability_matrix(A, leader_input(n, m, is_exact(A)), n)
    A22, A21 = reduce(A, m)
    return as_matrix(R[m:, m:]), controllability_matrix(A22, A21, n - m)


def images_coincide(X, Y) -> bool:
    """True iff ``Im X == Im Y`` (compared through ranks)."""
    X, Y = coerce(as_matrix(X), as_matrix(Y))
    rx, ry = rank(X), rank(Y)
    return rx == ry == rank(np.hstack([X, Y]))


def reduction_report(A, m: int, eps: float | None = None) -> dict:
    A = as_matrix(A)
    m = _check_m(A, m)
    n = A.shape[0]
    full = herdable(A, leader_input(n, m, is_exact(A)), eps)
    A22, A21 = reduce(A, m)
    red = herdable(A22, A21, eps)
    X, Y = follower_image_blocks(A, m)
    return {
        "A22": A22,
        "A21": A21,
        "full_status": full.status,
        "reduced_status": red.status,
        "statuses_agree": full.status == red.status,
        "images_coincide": images_coincide(X, Y),
        "full": full,
        "reduced": red,
    }


def lift_certificate(A, m: int, z, eps: float | None = None) -> np.ndarray:
    """Turn a certificate of ``(A22, A21)`` into one of ``(A, [I_m; 0])``.

    With ``R(A, B) = [[I, P12], [0, P22]]`` we solve ``P22 u' = R(A22, A21) z``
    and set the leading block to ``1 - P12 u'``, which makes the first m
    rows exactly 1.
    """
    A = as_matrix(A)
    m = _check_m(A, m)
    n = A.shape[0]
    A22, A21 = reduce(A, m)
    Rr = controllability_matrix(A22, A21, n - m)
    Rr, Z = coerce(Rr, as_matrix(as_vector(z)))
    target = Rr.dot(Z)
    R = controllability_matrix(A, leader_input(n, m, is_exact(A)), n)
    R, target = coerce(R, as_matrix(target))
    tail = solve_consistent(R[m:, m:], target, eps)
    head = [1 - sum(a * b for a, b in zip(row, tail)) for row in R[:m, m:]]
    u = as_vector(list(head) + list(tail), exact=is_exact(R))
    if not verify_certificate(R, u):
        raise StructureError("lifted certificate failed verification")
    return u


def corollary1_check(A, m: int, eps: float | None = None) -> HerdabilityVerdict:
    """Strongly connected, structurally balanced, with a balance class inside the leader set."""
    A = as_matrix(A)
    m = _check_m(A, m)
    tol = resolve_eps(eps)
    G = graph_from_matrix(A, directed=True, eps=tol)
    if not is_strongly_connected(G):
        return HerdabilityVerdict.unknown(check="balanced_leaders", reason="not strongly connected")
    parts = structural_balance_partition(G, tol)
    if parts is None:
        return HerdabilityVerdict.unknown(check="balanced_leaders", reason="not structurally balanced")
    leaders = set(range(m))
    if not any(part and part <= leaders for part in parts):
        return HerdabilityVerdict.unknown(
            check="balanced_leaders",
            reason="no balance class inside the leader set",
            classes=[sorted(p) for p in parts],
        )
    A22, A21 = reduce(A, m)
    red = herdable(A22, A21, tol)
    if not red.is_herdable:
        raise StructureError("reduced pair rejected by the oracle despite balanced leaders")
    cert = lift_certificate(A, m, red.certificate, tol)
    return HerdabilityVerdict(
        Status.HERDABLE,
        certificate=cert,
        details={"check": "balanced_leaders", "classes": [sorted(p) for p in parts]},
    )


def corollary2_check(A, m: int, eps: float | None = None) -> HerdabilityVerdict:
    """Every follower adjacent to a leader, and each leader's outgoing arcs share one sign."""
    A = as_matrix(A)
    m = _check_m(A, m)
    tol = resolve_eps(eps)
    A11, _, A21, _ = block_partition(A, m)
    if has_zero_row(A21, tol) is not None:
        return HerdabilityVerdict.unknown(check="one_step_leaders", reason="a follower is not adjacent to any leader")
    cols, direction = [], []
    for j in range(m):
        s = is_unisigned(A21[:, j], tol)
        if s is None:
            if nonzero_pattern(A21[:, j], tol):
                return HerdabilityVerdict.unknown(check="one_step_leaders", reason=f"leader {j} has mixed arcs")
            continue
        cols.append(j)
        direction.append(int(s))
    z = compose_block_certificates(
        A21, [EliminationStep(tuple(cols), tuple(direction), frozenset(range(A21.shape[0])))], tol
    )
    n = A.shape[0]
    A11, Z = coerce(A11, as_matrix(z))
    head = [1 - v for v in A11.dot(Z)[:, 0]]
    u = list(head) + list(Z[:, 0]) + [0] * ((n - 2) * m)
    R = controllability_matrix(A, leader_input(n, m, is_exact(A)), n)
    u = as_vector(u, exact=is_exact(R) and is_exact(A11))
    if not verify_certificate(R, u):
        raise StructureError("embedded certificate failed verification")
    return HerdabilityVerdict(Status.HERDABLE, certificate=u, details={"check": "one_step_leaders"})
