import pytest
from hypothesis import given, settings, strategies as st

from src.errors import PreconditionError, RingMismatchError
from src.exact_linalg import IntMatrix
from src.polyspace import (IDENTITY, MINUS_IDENTITY, R, S, T, ZZ, EpsilonVector, HomogeneousPoly, X, Y, act,
                           act_matrix_epsilon, action_matrix, epsilon, epsilon_change_matrix, from_epsilon, mod,
                           stirling2_change_matrix, to_epsilon)

generators = st.sampled_from([S, T, R, T.inverse(), S.inverse()])


def polys(degree):
    return st.lists(st.integers(-50, 50), min_size=degree + 1, max_size=degree + 1).map(
        lambda c: HomogeneousPoly(degree, ZZ, tuple(c)))


def test_monomial_arithmetic():
    P = X * X + X * Y
    assert P.degree == 2
    assert P.coefficient(2, 0) == 1
    assert P.coefficient(1, 1) == 1
    assert (X + Y) ** 2 == X * X + X * Y * 2 + Y * Y


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        X + X.reduce(5)


def test_reduce():
    P = HomogeneousPoly(1, ZZ, (7, -3))
    assert P.reduce(5).coeffs == (2, 2)


def test_actions_of_generators():
    assert act(T, X) == X
    assert act(T, Y) == X + Y
    assert act(S, X) == Y
    assert act(S, Y) == -X


def test_rs_is_minus_t():
    assert R @ S == -T
    assert R.power(3) == MINUS_IDENTITY
    assert S.power(4) == IDENTITY


@settings(max_examples=50, deadline=None)
@given(generators, generators, polys(6))
def test_action_is_left_action(g, h, P):
    assert act(g @ h, P) == act(g, act(h, P))


@pytest.mark.parametrize("n", [1, 4, 7])
def test_action_matrix_is_multiplicative(n):
    assert action_matrix(S @ T, n) == action_matrix(S, n) @ action_matrix(T, n)


def test_rs_and_t_agree_in_even_degree():
    assert action_matrix(R @ S, 6) == action_matrix(T, 6)
    assert action_matrix(R @ S, 5) != action_matrix(T, 5)


def test_minus_identity_acts_by_sign():
    P = X ** 3
    assert act(MINUS_IDENTITY, P) == -P
    assert act(MINUS_IDENTITY, X * X) == X * X


@pytest.mark.parametrize("n", [0, 3, 8])
def test_change_matrices_are_inverse(n):
    assert stirling2_change_matrix(n) @ epsilon_change_matrix(n) == IntMatrix.identity(n + 1)


@settings(max_examples=50, deadline=None)
@given(polys(7))
def test_epsilon_round_trip(P):
    assert from_epsilon(to_epsilon(P)) == P


def test_epsilon_forms():
    # eps_2 in degree 3 is Y(Y - X) X
    assert epsilon(3, 2) == Y * (Y - X) * X
    assert epsilon(3, 0) == X ** 3


@pytest.mark.parametrize("n", [4, 9])
def test_t_lowers_epsilon_index(n):
    M = act_matrix_epsilon(T, n)
    for k in range(n + 1):
        expected = [0] * (n + 1)
        expected[k] = 1
        if k:
            expected[k - 1] = k
        assert M.column(k) == expected


def test_to_epsilon_needs_integers():
    with pytest.raises(PreconditionError):
        to_epsilon(X.reduce(3))


def test_epsilon_vector_shape():
    with pytest.raises(PreconditionError):
        EpsilonVector(3, (1, 2))


def test_modular_action_reduces():
    P = HomogeneousPoly(2, mod(7), (1, 2, 3))
    assert all(0 <= c < 7 for c in act(T, P).coeffs)
    assert act(T, P) == act(T, HomogeneousPoly(2, ZZ, (1, 2, 3))).reduce(7)


def test_dict_round_trip():
    P = X ** 2 * 3 - Y ** 2
    assert HomogeneousPoly.from_dict(P.to_dict()) == P
