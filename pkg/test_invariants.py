import pytest

from src.cohomology import h0_mod
from src.errors import PreconditionError, RingMismatchError
from src.exact_linalg import solve_mod_prime
from src.invariants import (additive_order, dickson_identity_check, dickson_pair, dickson_verify, generator_exponents,
                            independence_witness, is_invariant, is_primitive, noninvariance_witness,
                            primitive_ring_membership_mod_p)
from src.polyspace import ZZ, HomogeneousPoly, X, Y


def test_dickson_forms_mod_5():
    pair = dickson_pair(5, 1)
    # f1 = X^5 Y - X Y^5, f2 = sum X^(4i) Y^(4(5-i))
    assert pair.f1 == X ** 5 * Y - X * Y ** 5
    assert pair.f2.degree == 20
    assert pair.f2.coeffs[::4] == (1,) * 6


def test_lifted_degrees():
    pair = dickson_pair(5, 2)
    assert pair.f1.degree == 30
    assert pair.f2.degree == 100


@pytest.mark.parametrize("p, delta", [(5, 1), (5, 2), (5, 3), (7, 1), (7, 2), (7, 3)])
def test_dickson_verify(p, delta):
    report = dickson_verify(p, delta)
    assert report.ok, report.failures


def test_unlifted_form_moves_mod_p_squared():
    f1 = dickson_pair(5, 1).f1
    assert is_invariant(f1, 5, 1)
    witness = noninvariance_witness(f1, 5, 2)
    assert witness is not None
    assert witness['generator'] == 'T'
    assert witness['coefficient'] % 5 == 0


def test_order_of_lift():
    pair = dickson_pair(7, 2)
    assert additive_order(pair.f1.reduce(49)) == 49
    assert is_primitive(pair.f2, 7, 2)
    assert not is_primitive(pair.f1.reduce(49) * 7, 7, 2)


def test_order_over_integers():
    assert additive_order(HomogeneousPoly.zero(3, ZZ)) == 1
    with pytest.raises(PreconditionError):
        additive_order(X)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_dickson_identity(p):
    assert dickson_identity_check(p)


def test_independence():
    assert independence_witness(5, 1)
    assert independence_witness(5, 2, bound=3)


def test_generator_exponents():
    assert generator_exponents(5, 1, 26) == [(1, 1)]
    assert generator_exponents(5, 1, 60) == [(0, 3), (10, 0)]
    assert generator_exponents(5, 1, 7) == []


def test_membership_of_product():
    pair = dickson_pair(5, 2)
    product = (pair.f1 ** 2 * pair.f2 * 3).reduce(25)
    assert primitive_ring_membership_mod_p(product, 5, 2) == {(2, 1): 3}


@pytest.mark.parametrize("p", [5, 7])
def test_dickson_forms_lie_in_the_invariant_kernel(p):
    pair = dickson_pair(p, 1).reduce(p)
    for f in (pair.f1, pair.f2):
        space = h0_mod(f.degree, p, 1)
        assert solve_mod_prime([P.coeffs for P in space.basis], f.coeffs, p) is not None


def test_primitive_invariants_of_degree_30_mod_25():
    space = h0_mod(30, 5, 2)
    assert space.structure.torsion == (25,)
    primitive = space.primitive_basis()
    assert primitive
    for P in primitive:
        assert set(primitive_ring_membership_mod_p(P, 5, 2)) == {(1, 0)}


def test_membership_needs_invariant_form():
    with pytest.raises(PreconditionError):
        primitive_ring_membership_mod_p((X ** 30).reduce(25), 5, 2)


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        noninvariance_witness(X.reduce(7), 5, 1)


@pytest.mark.parametrize("p", [2, 3, 9])
def test_small_or_composite_primes_rejected(p):
    with pytest.raises(PreconditionError):
        dickson_pair(p, 1)
