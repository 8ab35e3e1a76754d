import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from herdkit.errors import CoverageError, PartitionError, StructureError
from herdkit.leaders import (
    LeaderFollowerSystem,
    corollary1_check,
    corollary2_check,
    layer_blocks,
    leader_input,
    lift_certificate,
    prop2_check,
    prop3_check,
    reduce,
    reduction_report,
    validate_assumption1,
)
from herdkit.graph import LayerDecomposition
from herdkit.linalg import controllability_matrix
from herdkit.oracle import Status, herdable, verify_certificate

PATH3 = [[0, 1, 0], [1, 0, 1], [0, 1, 0]]


def system_with_phi(phi):
    """Leader-follower system whose single layer block equals ``phi`` (leaders 0..m-1)."""
    phi = np.array(phi, dtype=object)
    mk, m = phi.shape
    n = m + mk
    A = np.zeros((n, n), dtype=object)
    A[m:, :m] = phi
    return validate_assumption1(A.tolist(), m)


def test_validate_examples():
    S = validate_assumption1(PATH3, 1)
    assert S.layers.layers == ((1,), (2,)) and S.is_identity_order
    A = [[0, 0, 1], [0, 0, 1], [1, 1, 0]]  # 1 - 3 - 2: node 3 at distance 1
    S = validate_assumption1(A, 1)
    assert S.perm == (0, 2, 1)
    assert S.to_caller_order(["a", "b", "c"]) == ["a", "c", "b"]
    with pytest.raises(CoverageError):
        validate_assumption1([[0, 0], [0, 0]], 1)
    with pytest.raises(PartitionError):
        validate_assumption1(PATH3, 3)


def test_layer_block_examples():
    assert [b.tolist() for b in layer_blocks(validate_assumption1(PATH3, 1))] == [[[1]], [[1]]]
    star = [[0, 2, -3], [2, 0, 0], [-3, 0, 0]]
    assert [b.tolist() for b in layer_blocks(validate_assumption1(star, 1))] == [[[2], [-3]]]
    S = LeaderFollowerSystem(np.zeros((2, 2), dtype=object), 2, LayerDecomposition((0, 1), ()), (0, 1))
    assert layer_blocks(S) == []


def test_prop2_examples():
    v = prop2_check(validate_assumption1(PATH3, 1))
    assert v.is_herdable and verify_certificate(controllability_matrix(PATH3, leader_input(3, 1), 3), v.certificate)
    assert prop2_check(system_with_phi([[1, -1], [-1, 1]])).status is Status.UNKNOWN
    assert prop2_check(system_with_phi([[1, -1], [0, 1], [0, 1]])).status is Status.UNKNOWN


def test_prop3_examples():
    S = system_with_phi([[1, 3], [0, -2], [0, -7]])
    v = prop3_check(S)
    assert v.is_herdable
    assert verify_certificate(controllability_matrix(S.A, S.B, S.n), v.certificate)
    assert prop2_check(S).status is Status.UNKNOWN
    assert prop3_check(system_with_phi([[1, 3], [0, -2], [0, 7]])).status is Status.UNKNOWN
    assert prop3_check(validate_assumption1(PATH3, 1)).is_herdable


def test_reduce_examples():
    A22, A21 = reduce([[0, 1], [1, 0]], 1)
    assert A22.tolist() == [[0]] and A21.tolist() == [[1]]
    A22, A21 = reduce(PATH3, 1)
    assert A22.tolist() == [[0, 1], [1, 0]] and A21.tolist() == [[1], [0]]
    A22, _ = reduce(PATH3, 2)
    assert A22.shape == (1, 1)
    with pytest.raises(PartitionError):
        reduce(PATH3, 0)


def test_reduction_report_agrees():
    rep = reduction_report(PATH3, 1)
    assert rep["statuses_agree"] and rep["images_coincide"]


def test_corollary1_examples():
    v = corollary1_check([[0, -1], [-1, 0]], 1)
    assert v.is_herdable and verify_certificate(controllability_matrix([[0, -1], [-1, 0]], [[1], [0]], 2), v.certificate)
    v = corollary1_check([[0, 1], [1, 0]], 1)
    assert v.status is Status.UNKNOWN
    assert herdable([[0, 1], [1, 0]], [[1], [0]]).is_herdable
    assert corollary1_check([[0, 0], [1, 0]], 1).status is Status.UNKNOWN


def test_corollary2_examples():
    A = np.zeros((5, 5), dtype=int)
    A[2:, :2] = [[1, 0], [2, 0], [0, -1]]
    v = corollary2_check(A.tolist(), 2)
    assert v.is_herdable
    assert verify_certificate(controllability_matrix(A.tolist(), leader_input(5, 2), 5), v.certificate)
    A[4, :2] = 0
    assert corollary2_check(A.tolist(), 2).status is Status.UNKNOWN
    assert corollary2_check([[0, 0, 0], [1, 0, 0], [-1, 0, 0]], 1).status is Status.UNKNOWN


@st.composite
def leader_systems(draw, max_n=6):
    m = draw(st.integers(1, 2))
    n = draw(st.integers(m + 1, max_n))
    A = draw(st.lists(st.lists(st.sampled_from([-2, -1, 0, 0, 0, 1, 2]), min_size=n, max_size=n),
                      min_size=n, max_size=n))
    return A, m


@settings(max_examples=120, deadline=None)
@given(leader_systems())
def test_layered_checks_sound_and_monotone(sys_):
    A, m = sys_
    try:
        S = validate_assumption1(A, m)
    except CoverageError:
        return
    R = controllability_matrix(S.A, S.B, S.n)
    p2, p3 = prop2_check(S), prop3_check(S)
    if p2.is_herdable:
        assert p3.is_herdable
    for v in (p2, p3):
        if v.is_herdable:
            assert verify_certificate(R, v.certificate)
            assert herdable(A, leader_input(len(A), m)).is_herdable


@settings(max_examples=120, deadline=None)
@given(leader_systems())
def test_corollaries_sound(sys_):
    A, m = sys_
    B = leader_input(len(A), m)
    R = controllability_matrix(A, B, len(A))
    for check in (corollary1_check, corollary2_check):
        v = check(A, m)
        if v.is_herdable:
            assert verify_certificate(R, v.certificate)
            assert herdable(A, B).is_herdable


@settings(max_examples=120, deadline=None)
@given(leader_systems())
def test_lifted_certificates_verify(sys_):
    A, m = sys_
    A22, A21 = reduce(A, m)
    red = herdable(A22, A21)
    if red.is_herdable:
        u = lift_certificate(A, m, red.certificate)
        assert verify_certificate(controllability_matrix(A, leader_input(len(A), m), len(A)), u)


def test_float_layers():
    A = [[0.0, 0.5, 0.0], [0.5, 0.0, -0.25], [0.0, -0.25, 0.0]]
    v = prop2_check(validate_assumption1(A, 1))
    assert v.is_herdable


def test_cancelling_walks_give_unknown():
    # two length-2 walks into node 4 cancel: 1 -> 2 -> 4 (weights 1, 1) and 1 -> 3 -> 4 (1, -1)
    A = [[0, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0], [0, 1, -1, 0]]
    S = validate_assumption1(A, 1)
    with pytest.raises(StructureError):
        layer_blocks(S)
    assert layer_blocks(S, strict=False)[1].tolist() == [[0]]
    v = prop3_check(S)
    assert v.status is Status.UNKNOWN and v.details["failing_layer"] == 2
