from fractions import Fraction

import pytest
from sympy import Poly

from src.errors import InsufficientPrecisionError, PreconditionError
from src.models import CongruencePrediction
from src.modforms import (QExpansion, bernoulli, char_poly, collapse_predictions, congruence_suite, cusp_dimension,
                          delta, eigenvalue_field_check, eisenstein, eta_delta, hecke_matrix, hecke_operator,
                          miller_basis, predict_congruences, serre_congruence, verify_congruence, x)


@pytest.mark.parametrize("k, value", [
    (0, Fraction(1)), (1, Fraction(-1, 2)), (2, Fraction(1, 6)), (4, Fraction(-1, 30)),
    (7, Fraction(0)), (12, Fraction(-691, 2730)),
])
def test_bernoulli(k, value):
    assert bernoulli(k) == value


def test_eisenstein_coefficients():
    E4 = eisenstein(4, 4)
    assert E4.coeffs == (1, 240, 2160, 6720)
    assert eisenstein(6, 3).coeffs == (1, -504, -16632)
    assert E4.is_integral()


def test_eisenstein_weight_checked():
    with pytest.raises(PreconditionError):
        eisenstein(2, 5)


def test_delta_agrees_with_product():
    assert delta(30) == eta_delta(30)


def test_ramanujan_tau():
    D = delta(12)
    assert [D[n] for n in range(1, 7)] == [1, -24, 252, -1472, 4830, -6048]
    assert D[6] == D[2] * D[3]


def test_missing_coefficient():
    with pytest.raises(InsufficientPrecisionError):
        delta(5)[5]


def test_weights_must_match_for_sums():
    with pytest.raises(PreconditionError):
        eisenstein(4, 5) + eisenstein(6, 5)


def test_products_add_weights():
    assert (eisenstein(4, 5) * eisenstein(6, 5)).weight == 10
    assert (eisenstein(4, 5) ** 3).weight == 12


@pytest.mark.parametrize("k, dim", [(12, 1), (14, 0), (24, 2), (26, 1), (36, 3), (10, 0)])
def test_cusp_dimension(k, dim):
    assert cusp_dimension(k) == dim


def test_miller_basis_is_normalized():
    basis = miller_basis(36, 12)
    assert len(basis) == 3
    for i, f in enumerate(basis, start=1):
        assert f[0] == 0
        assert [f[j] for j in range(1, 4)] == [1 if j == i else 0 for j in range(1, 4)]
        assert f.is_integral()


def test_miller_basis_precision():
    with pytest.raises(InsufficientPrecisionError):
        miller_basis(24, 2)


def test_delta_is_hecke_eigenform():
    D = delta(40)
    image = hecke_operator(D, 2)
    assert image == D.truncate(image.precision).scale(-24)


def test_weight_24_characteristic_polynomial():
    poly = char_poly(hecke_matrix(24, 2, 5))
    assert poly == Poly(x ** 2 - 1080 * x - 20468736, x)


def test_eigenvalue_field():
    assert eigenvalue_field_check()


def test_hecke_matrix_precision():
    with pytest.raises(InsufficientPrecisionError):
        hecke_matrix(24, 3, 6)


def test_predictions_in_degree_10():
    predictions = predict_congruences(10)
    assert [(p.ell, p.e, p.a, p.b) for p in predictions] == [(5, 1, 6, 5), (5, 1, 1, 10), (7, 1, 4, 7)]
    collapsed = collapse_predictions(predictions)
    assert [(p.ell, p.a, p.b) for p in collapsed] == [(5, 6, 5), (7, 4, 7)]


def test_prediction_in_degree_34_mod_25():
    predictions = predict_congruences(34)
    assert CongruencePrediction(n=34, ell=5, e=2, a=10, b=25, k=25) in predictions


def test_prediction_rhs():
    pred = serre_congruence()
    assert pred.modulus == 25
    assert pred.weight == 12
    assert pred.rhs(2) == (2 + 2 ** 10) % 25


@pytest.mark.parametrize("pred", [
    CongruencePrediction(n=10, ell=5, e=1, a=6, b=5, k=5),
    CongruencePrediction(n=10, ell=7, e=1, a=4, b=7, k=7),
    CongruencePrediction(n=10, ell=5, e=2, a=1, b=10, k=10),
])
def test_tau_congruences(pred):
    report = verify_congruence(pred, 60)
    assert report.ok, report.failures
    assert all(row['p'] != pred.ell for row in report.rows)


def test_weight_24_congruence_mod_13():
    report = verify_congruence(CongruencePrediction(n=22, ell=13, e=1, a=10, b=13, k=13), 11)
    assert report.ok, report.failures


def test_weight_24_suite_up_to_50():
    report = congruence_suite(22, [5, 7, 11, 13], 50, 50)
    assert report.ok, report.failures
    assert {pred['ell'] for pred in report.details['predictions']} == {5, 7, 11, 13}
    assert max(row['p'] for row in report.rows) == 47


def test_weight_36_determinant_mod_25():
    report = verify_congruence(CongruencePrediction(n=34, ell=5, e=2, a=10, b=25, k=25), 30)
    assert report.ok, report.failures
    assert all(row['lhs'] == 0 for row in report.rows)


def test_wrong_congruence_fails():
    report = verify_congruence(CongruencePrediction(n=10, ell=7, e=1, a=1, b=7, k=7), 20)
    assert not report.ok


def test_no_cusp_forms():
    report = verify_congruence(CongruencePrediction(n=12, ell=7, e=1, a=6, b=7, k=7), 10)
    assert not report.ok
    assert report.failures == ["no cusp forms of weight 14"]


def test_suite_adds_mod_25_prediction():
    report = congruence_suite(10, [5, 7], 30)
    assert report.ok, report.failures
    assert len(report.details['predictions']) == 3


def test_series_to_dict():
    series = QExpansion(0, (Fraction(1, 2), 3))
    assert series.to_dict() == {'weight': 0, 'precision': 2, 'coeffs': ['1/2', '3']}
    assert not series.is_integral()
