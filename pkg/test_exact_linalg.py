import pytest
from hypothesis import given, settings, strategies as st

from src.errors import PreconditionError
from src.exact_linalg import (IntMatrix, class_order, class_order_mod, cokernel_mod, cokernel_structure,
                              elementary_divisors, kernel_basis, kernel_mod, smith_normal_form, solve_mod_prime)
from src.models import AbelianGroupStructure, normalize_divisors

small_matrices = st.integers(min_value=1, max_value=5).flatmap(
    lambda rows: st.integers(min_value=1, max_value=5).flatmap(
        lambda cols: st.lists(st.lists(st.integers(-20, 20), min_size=cols, max_size=cols),
                              min_size=rows, max_size=rows)))


def test_smith_of_diagonal():
    A = IntMatrix.from_rows([[2, 0], [0, 3]])
    assert normalize_divisors(elementary_divisors(A)) == [6]
    assert cokernel_structure(A) == AbelianGroupStructure(0, (6,))


def test_cokernel_with_free_part():
    A = IntMatrix.from_rows([[2], [0]])
    structure = cokernel_structure(A)
    assert structure.free_rank == 1
    assert structure.torsion == (2,)
    assert str(structure) == 'ℤ ⊕ ℤ/2'


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_smith_transforms_reproduce_diagonal(rows):
    A = IntMatrix.from_rows(rows)
    snf = smith_normal_form(A)
    assert snf.U @ A @ snf.V == snf.D
    assert snf.D.is_diagonal()
    assert abs(snf.U.determinant()) == 1
    assert abs(snf.V.determinant()) == 1
    diagonal = [abs(d) for d in snf.diagonal if d]
    for a, b in zip(diagonal, diagonal[1:]):
        assert b % a == 0
    assert normalize_divisors(diagonal) == normalize_divisors(elementary_divisors(A))


@settings(max_examples=60, deadline=None)
@given(small_matrices)
def test_kernel_basis_is_annihilated(rows):
    A = IntMatrix.from_rows(rows)
    K = kernel_basis(A)
    for column in K.columns():
        assert A.apply(column) == [0] * A.rows
    assert K.cols == A.cols - smith_normal_form(A).rank


def test_cokernel_mod_prime_power():
    A = IntMatrix.from_rows([[5, 0], [0, 0]])
    structure = cokernel_mod(A, 25)
    assert structure.torsion == (5, 25)
    assert structure.rank_m == 1


def test_cokernel_mod_composite_modulus():
    A = IntMatrix.from_rows([[2, 0], [0, 3]])
    structure = cokernel_mod(A, 6)
    assert structure.order() == 6


def test_cokernel_mod_rejects_small_modulus():
    with pytest.raises(PreconditionError):
        cokernel_mod(IntMatrix.identity(2), 1)


def test_kernel_mod_generators():
    A = IntMatrix.from_rows([[5, 0], [0, 1]])
    structure, generators, primitive = kernel_mod(A, 25)
    assert structure.torsion == (5,)
    for v in generators:
        assert all(x % 25 == 0 for x in A.apply(v))
    assert primitive == [False]


def test_class_order():
    A = IntMatrix.from_rows([[4], [0]])
    assert class_order(A, [1, 0]) == 4
    assert class_order(A, [2, 0]) == 2
    assert class_order(A, [0, 1]) is None
    assert class_order_mod(IntMatrix.from_rows([[0], [0]]), [5, 0], 25) == 5


def test_solve_mod_prime():
    assert solve_mod_prime([[1, 0], [1, 1]], [3, 1], 5) == [2, 1]
    assert solve_mod_prime([[1, 1]], [1, 2], 5) is None


@pytest.mark.parametrize("divisors, chain", [
    ([2, 3], [6]),
    ([4, 2, 1], [2, 4]),
    ([12, 18], [6, 36]),
    ([], []),
])
def test_normalize_divisors(divisors, chain):
    assert normalize_divisors(divisors) == chain


def test_primary_decomposition():
    structure = AbelianGroupStructure(0, (2, 12))
    assert structure.primary_decomposition() == [2, 3, 4]
    assert structure.p_part(2) == [2, 4]
    assert structure.primes() == [2, 3]
    assert structure.order() == 24
