import pytest

from src.coinvariant_ring import (class_order_in_coinvariants, coinvariants_degree, decomposition_witness_mod_p,
                                  hilbert_check, hilbert_closed_form, hilbert_series, lemma_pairing_unit,
                                  pairing_value, pairing_vanishing_check, primitive_generator_check,
                                  primitive_generator_monomial, vanishing_monomial_check)
from src.errors import PreconditionError
from src.models import AbelianGroupStructure
from src.polyspace import CoefficientRing, HomogeneousPoly


def test_closed_form_mod_p():
    series = hilbert_closed_form(5, 1, 30)
    nonzero = [d for d, c in enumerate(series) if c]
    assert nonzero == [0, 8, 12, 16, 20, 24, 28, 30]


def test_closed_form_higher_delta():
    # t^128 / ((1 - t^30)(1 - t^100))
    series = hilbert_closed_form(5, 2, 160)
    assert series[0] == 1
    assert [d for d, c in enumerate(series) if c and d] == [128, 158]


def test_hilbert_matches_closed_form_mod_5():
    report = hilbert_check(5, 1, 24)
    assert report.ok, report.failures
    assert report.details['first_mismatch'] is None


@pytest.mark.parametrize("p, delta, d_max", [(5, 2, 130), (7, 1, 60)])
def test_hilbert_matches_closed_form(p, delta, d_max):
    report = hilbert_check(p, delta, d_max)
    assert report.ok, report.failures


def test_hilbert_mod_25_has_a_single_generator_below_130():
    ranks = hilbert_check(5, 2, 130).details['coefficients']
    assert [d for d, rank in enumerate(ranks) if rank] == [0, 128]


def test_hilbert_with_injected_structures():
    fake = hilbert_check(5, 1, 8, structure_of=lambda d: AbelianGroupStructure(0, (), modulus=5))
    assert not fake.ok
    assert fake.details['first_mismatch'] == 0


def test_hilbert_series_degree_zero():
    series = hilbert_series(5, 1, 0)
    assert series.coefficients == [1]


def test_degree_out_of_range():
    with pytest.raises(PreconditionError):
        coinvariants_degree(5, 1, 201)


@pytest.mark.parametrize("a, b", [(1, 3), (3, 4), (8, 4), (4, 4), (6, 2)])
def test_vanishing_monomials(a, b):
    assert vanishing_monomial_check(5, 1, a, b)


def test_unit_class_has_full_order():
    one = HomogeneousPoly.monomial(0, 0, CoefficientRing(25))
    assert class_order_in_coinvariants(one, 5, 2) == 25


def test_primitive_generator_exponents():
    assert primitive_generator_monomial(5, 1).terms() == {(20, 4): 1}
    assert primitive_generator_monomial(5, 2).terms() == {(104, 24): 1}


@pytest.mark.parametrize("p, delta, degree", [(5, 1, 24), (5, 2, 128), (7, 1, 48)])
def test_primitive_generator(p, delta, degree):
    report = primitive_generator_check(p, delta)
    assert report.ok, report.failures
    assert report.details['degree'] == degree
    values = {row['check']: row['value'] for row in report.rows}
    assert values['U order'] == p ** delta
    assert values['critical rank'] == 1


def test_primitive_generator_rejects_other_parameters():
    with pytest.raises(PreconditionError):
        primitive_generator_check(11, 1)


def test_decomposition_witness():
    report = decomposition_witness_mod_p(5)
    assert report.ok, report.failures


def test_pairing_unit():
    assert lemma_pairing_unit(5, 1, 1) == 1


def test_pairing_vanishes_off_diagonal():
    assert pairing_vanishing_check(5, 1, 2, 1)


def test_pairing_exponents_must_be_nonnegative():
    with pytest.raises(PreconditionError):
        pairing_value(5, 1, 1, 1)
    with pytest.raises(PreconditionError):
        pairing_vanishing_check(5, 1, 1, 0)
