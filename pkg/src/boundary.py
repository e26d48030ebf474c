"""
Boundary cohomology M_n / (Id - T) M_n in the eps basis and the Hecke operators on it.

Since T eps_k = eps_k + k eps_(k-1), the relations are (k+1) eps_k = 0 for k < n and
the class of eps_n generates the free part.
"""
import functools
import logging
from dataclasses import dataclass
from math import gcd
from typing import Dict, Optional, Tuple

from sympy import isprime

from .combinat import stirling2
from .errors import PreconditionError
from .exact_linalg import IntMatrix, cokernel_structure
from .models import AbelianGroupStructure, CheckReport
from .polyspace import HomogeneousPoly, T, act_matrix_epsilon, epsilon, substitute, to_epsilon

logger = logging.getLogger(__name__)


def slot_modulus(n: int, j: int) -> int:
    """Order of the class of eps_j in degree n; 0 for the free slot j = n."""
    return 0 if j == n else j + 1


def _reduce_slot(n: int, j: int, x: int) -> int:
    m = slot_modulus(n, j)
    return x % m if m else x


@dataclass(frozen=True)
class BoundaryClass:
    degree: int
    coords: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.degree + 1:
            raise PreconditionError(f"degree {self.degree} needs {self.degree + 1} coordinates")
        reduced = tuple(_reduce_slot(self.degree, j, x) for j, x in enumerate(self.coords))
        object.__setattr__(self, 'coords', reduced)

    @property
    def moduli(self) -> Tuple[int, ...]:
        return tuple(slot_modulus(self.degree, j) for j in range(self.degree + 1))

    @classmethod
    def zero(cls, n: int) -> 'BoundaryClass':
        return cls(n, (0,) * (n + 1))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: 'BoundaryClass') -> 'BoundaryClass':
        if self.degree != other.degree:
            raise PreconditionError(f"cannot add boundary classes of degrees {self.degree} and {other.degree}")
        return BoundaryClass(self.degree, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> 'BoundaryClass':
        return BoundaryClass(self.degree, tuple(-a for a in self.coords))

    def __sub__(self, other: 'BoundaryClass') -> 'BoundaryClass':
        return self + (-other)

    def scale(self, c: int) -> 'BoundaryClass':
        return BoundaryClass(self.degree, tuple(c * a for a in self.coords))

    def to_dict(self) -> Dict:
        return {'degree': self.degree, 'coords': [str(c) for c in self.coords], 'moduli': list(self.moduli)}


def _check_degree(n: int):
    if n < 1:
        raise PreconditionError(f"boundary cohomology needs n >= 1, got {n}")


def boundary_structure(n: int) -> AbelianGroupStructure:
    """Z + Z/2 + ... + Z/n as an elementary-divisor chain."""
    _check_degree(n)
    return AbelianGroupStructure(free_rank=1, torsion=tuple(range(2, n + 1)))


def boundary_structure_snf(n: int) -> AbelianGroupStructure:
    """The same group read off the Smith form of Id - T in the eps basis."""
    _check_degree(n)
    relation = IntMatrix.identity(n + 1) - act_matrix_epsilon(T, n)
    return cokernel_structure(relation)


def reduce_to_boundary(P: HomogeneousPoly) -> BoundaryClass:
    if not P.ring.is_integral:
        raise PreconditionError("boundary reduction needs integer coefficients")
    _check_degree(P.degree)
    return BoundaryClass(P.degree, to_epsilon(P).coords)


def hecke_polynomial(p: int, P: HomogeneousPoly) -> HomogeneousPoly:
    """T_p P = sum_j P(X, p(jX + Y)) + P(pX, Y)."""
    result = substitute(P, p, 0, 0, 1)
    for j in range(p):
        result = result + substitute(P, 1, p * j, 0, p)
    return result


def hecke_eigenvalue(p: int, n: int, k: int) -> int:
    return p ** (n - k) + p ** (k + 1)


@dataclass(frozen=True)
class HeckeBoundaryMatrix:
    p: int
    degree: int
    entries: IntMatrix

    def quotient_entry(self, j: int, k: int) -> int:
        """Entry (j, k) reduced modulo the order of eps_j."""
        return _reduce_slot(self.degree, j, self.entries[j, k])

    def apply(self, cls: BoundaryClass) -> BoundaryClass:
        if cls.degree != self.degree:
            raise PreconditionError(f"class of degree {cls.degree} given to T_{self.p} on degree {self.degree}")
        return BoundaryClass(self.degree, tuple(self.entries.apply(cls.coords)))

    def to_dict(self) -> Dict:
        n = self.degree
        return {'p': self.p, 'n': n,
                'quotient': [[self.quotient_entry(j, k) for k in range(n + 1)] for j in range(n + 1)]}


@functools.lru_cache(maxsize=64)
def hecke_boundary_matrix(p: int, n: int) -> HeckeBoundaryMatrix:
    if not isprime(p):
        raise PreconditionError(f"T_p needs a prime, got {p}")
    _check_degree(n)
    columns = []
    for k in range(n + 1):
        columns.append(list(to_epsilon(hecke_polynomial(p, epsilon(n, k))).coords))
    logger.debug(f"Hecke matrix T_{p} on degree {n} built")
    return HeckeBoundaryMatrix(p=p, degree=n, entries=IntMatrix.from_columns(columns, n + 1))


def eigen_obstruction(p: int, n: int, j: int, k: int) -> int:
    """(p^(n-k) + p^(k+1) - p^(n-j) - p^(j+1)) {k, j} mod (j+1): the (j, k) entry of T_p on the quotient."""
    if not 0 <= j < k <= n:
        raise PreconditionError(f"need 0 <= j < k <= n, got j={j}, k={k}, n={n}")
    value = (hecke_eigenvalue(p, n, k) - hecke_eigenvalue(p, n, j)) * stirling2(k, j)
    return value % (j + 1)


def verify_hecke_eigen(p: int, n: int) -> CheckReport:
    """Is T_p diagonal on the quotient with eigenvalue p^(n-k) + p^(k+1) on eps_k?"""
    matrix = hecke_boundary_matrix(p, n)
    report = CheckReport(name=f"hecke p={p} n={n}")
    first_failure: Optional[Dict] = None
    for k in range(1, n + 1):
        eigenvalue = hecke_eigenvalue(p, n, k)
        column_ok = True
        for j in range(1, n + 1):
            expected = _reduce_slot(n, j, eigenvalue if j == k else 0)
            residue = matrix.quotient_entry(j, k)
            if residue != expected:
                column_ok = False
                report.fail(f"entry ({j},{k}) is {residue} mod {slot_modulus(n, j)}, expected {expected}")
                if first_failure is None:
                    first_failure = {'j': j, 'k': k, 'residue': residue, 'modulus': slot_modulus(n, j)}
        report.rows.append({'p': p, 'n': n, 'k': k, 'eigenvalue': eigenvalue, 'ok': column_ok})
    report.details = {'first_failure': first_failure, 'semisimple_expected': p > n}
    if report.ok:
        logger.info(f"T_{p} is diagonal on the boundary in degree {n}")
    else:
        logger.info(f"T_{p} on degree {n}: {len(report.failures)} off-diagonal entries, first {first_failure}")
    return report


def weak_congruence_check(p: int, n: int, q: int, k: int) -> bool:
    """For q | k+1: T_p(eps_k) = (p^(n-k) + p^(k+1)) eps_k in the boundary cohomology tensored with Z/q."""
    if not isprime(q) or (k + 1) % q:
        raise PreconditionError(f"need a prime q dividing k+1, got q={q}, k={k}")
    if not 0 <= k <= n:
        raise PreconditionError(f"k={k} outside 0..{n}")
    matrix = hecke_boundary_matrix(p, n)
    eigenvalue = hecke_eigenvalue(p, n, k)
    for j in range(n + 1):
        m = slot_modulus(n, j)
        tensor = q if m == 0 else gcd(m, q)
        if tensor == 1:
            continue
        difference = matrix.entries[j, k] - (eigenvalue if j == k else 0)
        if difference % tensor:
            logger.debug(f"weak congruence fails at slot {j} for p={p}, n={n}, q={q}, k={k}")
            return False
    return True


def hecke_commutes(p: int, q: int, n: int) -> bool:
    """Do T_p and T_q commute on the boundary cohomology in degree n?"""
    A = hecke_boundary_matrix(p, n).entries
    B = hecke_boundary_matrix(q, n).entries
    commutator = A @ B - B @ A
    return all(_reduce_slot(n, j, commutator[j, k]) == 0 for j in range(n + 1) for k in range(n + 1))

