from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from herdkit.errors import DimensionError, NotHerdableError, NumericError
from herdkit.herding import simulate, synthesize_plan
from herdkit.oracle import herdable


def test_direct_actuation():
    plan = synthesize_plan([[0, 0], [0, 0]], [[1, 0], [0, 1]], [0, 0], 1)
    assert plan.alpha == 1 and plan.final_time == 2
    assert plan.inputs.tolist() == [[0, 0], [1, 1]]
    assert plan.final_state.tolist() == [1, 1]


def test_swap_system():
    plan = synthesize_plan([[0, 1], [1, 0]], [[1], [0]], [0, 0], 2)
    assert plan.alpha == 2 and plan.final_time == 2
    assert all(x >= 2 for x in plan.final_state)


def test_clamping_when_already_above():
    plan = synthesize_plan([[0, 1], [1, 0]], [[1], [0]], [5, 7], 2)
    assert plan.alpha == 0
    assert plan.final_state.tolist() == [5, 7]
    plan = synthesize_plan([[0, 1], [1, 0]], [[1], [0]], [5, -7], 2)
    assert plan.alpha > 0 and plan.meets_threshold()


def test_not_herdable():
    with pytest.raises(NotHerdableError):
        synthesize_plan([[0, 0], [0, 0]], [[1], [0]], [0, 0], 1)


def test_bad_certificate():
    with pytest.raises(NumericError):
        synthesize_plan([[0, 0], [0, 0]], [[1, 0], [0, 1]], [0, 0], 1, certificate=[1, 0, 0, 0])


def test_simulate_examples():
    traj = simulate([[1, 0], [0, 1]], [[1], [0]], [3, 4], [[0], [0], [0]])
    assert traj.tolist() == [[3, 4]] * 4
    assert simulate([[0, 0], [0, 0]], [[1, 0], [0, 1]], [0, 0], [[5, 6]])[1].tolist() == [5, 6]
    assert simulate([[0, 1], [1, 0]], [[1], [0]], [0, 0], [[1], [0]])[2].tolist() == [0, 1]
    with pytest.raises(DimensionError):
        simulate([[1, 0], [0, 1]], [[1], [0]], [0, 0], [[1, 2]])
    with pytest.raises(DimensionError):
        simulate([[1, 0], [0, 1]], [[1], [0]], [0], [[1]])


@st.composite
def systems(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, 2))
    ints = st.integers(-3, 3)
    A = draw(st.lists(st.lists(ints, min_size=n, max_size=n), min_size=n, max_size=n))
    B = draw(st.lists(st.lists(ints, min_size=m, max_size=m), min_size=n, max_size=n))
    x0 = draw(st.lists(ints, min_size=n, max_size=n))
    return A, B, x0


@settings(max_examples=80, deadline=None)
@given(systems(), st.sampled_from([1, 10, Fraction(5, 2)]))
def test_exact_plans_meet_threshold_and_replay(sys_, h):
    A, B, x0 = sys_
    assume(herdable(A, B).is_herdable)
    plan = synthesize_plan(A, B, x0, h)
    assert all(x >= h for x in plan.final_state)
    assert simulate(A, B, x0, plan.inputs)[-1].tolist() == plan.final_state.tolist()


@settings(max_examples=60, deadline=None)
@given(systems(), systems())
def test_superposition(s1, s2):
    A, B, x0 = s1
    n, m = len(A), len(B[0])
    x1 = s2[2][:n] + [0] * max(0, n - len(s2[2]))
    U = [[t + j for j in range(m)] for t in range(3)]
    V = [[t * j - 1 for j in range(m)] for t in range(3)]
    lhs = simulate(A, B, x0, U) + simulate(A, B, x1, V)
    rhs = simulate(A, B, [a + b for a, b in zip(x0, x1)], [[a + b for a, b in zip(u, v)] for u, v in zip(U, V)])
    assert lhs.tolist() == rhs.tolist()


def test_float_plans():
    rng = np.random.default_rng(11)
    done = 0
    while done < 30:
        n = int(rng.integers(1, 6))
        A = rng.standard_normal((n, n)).tolist()
        B = rng.standard_normal((n, 1)).tolist()
        if not herdable(A, B).is_herdable:
            continue
        x0 = (5 * rng.standard_normal(n)).tolist()
        plan = synthesize_plan(A, B, x0, 10.0)
        assert plan.meets_threshold(1e-6)
        assert np.allclose(simulate(A, B, x0, plan.inputs)[-1], plan.final_state)
        done += 1
