"""
Homogeneous forms in X, Y over Z or Z/m and the SL2(Z) substitution action.

Convention: g = [[a, b], [c, d]] acts by (g.P)(X, Y) = P(aX + cY, bX + dY).
This is a left action, act(g*h, P) = act(g, act(h, P)), hence
action_matrix(g*h) = action_matrix(g) @ action_matrix(h).
With R = [[1,-1],[1,0]] and S = [[0,-1],[1,0]] one gets R*S = -T, so act(R*S)
and act(T) agree exactly in even degree.

Coefficient lists are indexed by the X-exponent: coeffs[v] multiplies X^v Y^(n-v).
The falling-factorial basis is eps_k = Y(Y-X)...(Y-(k-1)X) X^(n-k).
"""
import functools
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .combinat import stirling1_signed, stirling2
from .errors import PreconditionError, RingMismatchError
from .exact_linalg import IntMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoefficientRing:
    """modulus 0 means Z, otherwise Z/modulus."""
    modulus: int = 0

    def __post_init__(self):
        if self.modulus < 0 or self.modulus == 1:
            raise PreconditionError(f"modulus must be 0 or >= 2, got {self.modulus}")

    @property
    def is_integral(self) -> bool:
        return self.modulus == 0

    def reduce(self, x: int) -> int:
        return x % self.modulus if self.modulus else x

    def __str__(self) -> str:
        return 'ZZ' if self.modulus == 0 else f"Z/{self.modulus}"


ZZ = CoefficientRing(0)


def mod(m: int) -> CoefficientRing:
    return CoefficientRing(m)


@dataclass(frozen=True)
class UnimodularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise PreconditionError(f"determinant of {self} is not 1")

    def __matmul__(self, other: 'UnimodularMatrix') -> 'UnimodularMatrix':
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c, self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c, self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> 'UnimodularMatrix':
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def power(self, e: int) -> 'UnimodularMatrix':
        base = self if e >= 0 else self.inverse()
        result = IDENTITY
        for _ in range(abs(e)):
            result = result @ base
        return result

    def __neg__(self) -> 'UnimodularMatrix':
        return UnimodularMatrix(-self.a, -self.b, -self.c, -self.d)


IDENTITY = UnimodularMatrix(1, 0, 0, 1)
MINUS_IDENTITY = UnimodularMatrix(-1, 0, 0, -1)
R = UnimodularMatrix(1, -1, 1, 0)
S = UnimodularMatrix(0, -1, 1, 0)
T = UnimodularMatrix(1, 1, 0, 1)


def _convolve(f: Sequence[int], g: Sequence[int], modulus: int) -> List[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for j, y in enumerate(g):
                if y:
                    out[i + j] += x * y
    if modulus:
        out = [x % modulus for x in out]
    return out


@dataclass(frozen=True)
class HomogeneousPoly:
    degree: int
    ring: CoefficientRing
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if self.degree < 0:
            raise PreconditionError(f"negative degree {self.degree}")
        if len(self.coeffs) != self.degree + 1:
            raise PreconditionError(f"degree {self.degree} needs {self.degree + 1} coefficients, got {len(self.coeffs)}")
        if self.ring.modulus:
            object.__setattr__(self, 'coeffs', tuple(x % self.ring.modulus for x in self.coeffs))
        else:
            object.__setattr__(self, 'coeffs', tuple(int(x) for x in self.coeffs))

    @classmethod
    def zero(cls, degree: int, ring: CoefficientRing = ZZ) -> 'HomogeneousPoly':
        return cls(degree, ring, (0,) * (degree + 1))

    @classmethod
    def monomial(cls, x_exp: int, y_exp: int, ring: CoefficientRing = ZZ, coefficient: int = 1) -> 'HomogeneousPoly':
        coeffs = [0] * (x_exp + y_exp + 1)
        coeffs[x_exp] = coefficient
        return cls(x_exp + y_exp, ring, tuple(coeffs))

    @classmethod
    def from_terms(cls, degree: int, terms: Dict[Tuple[int, int], int], ring: CoefficientRing = ZZ) -> 'HomogeneousPoly':
        """terms maps (x_exp, y_exp) to a coefficient."""
        coeffs = [0] * (degree + 1)
        for (i, j), c in terms.items():
            if i + j != degree:
                raise PreconditionError(f"term X^{i}Y^{j} is not of degree {degree}")
            coeffs[i] += c
        return cls(degree, ring, tuple(coeffs))

    def coefficient(self, x_exp: int, y_exp: int) -> int:
        if x_exp + y_exp != self.degree or x_exp < 0 or y_exp < 0:
            return 0
        return self.coeffs[x_exp]

    def terms(self) -> Dict[Tuple[int, int], int]:
        return {(v, self.degree - v): c for v, c in enumerate(self.coeffs) if c}

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def reduce(self, modulus: int) -> 'HomogeneousPoly':
        """Image in Z/modulus (modulus 0 lifts residues back to Z)."""
        return HomogeneousPoly(self.degree, CoefficientRing(modulus), self.coeffs)

    def _check(self, other: 'HomogeneousPoly'):
        if self.ring != other.ring:
            raise RingMismatchError(f"cannot combine {self.ring} with {other.ring}")

    def __add__(self, other: 'HomogeneousPoly') -> 'HomogeneousPoly':
        self._check(other)
        if self.degree != other.degree:
            raise PreconditionError(f"cannot add degrees {self.degree} and {other.degree}")
        return HomogeneousPoly(self.degree, self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> 'HomogeneousPoly':
        return HomogeneousPoly(self.degree, self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other: 'HomogeneousPoly') -> 'HomogeneousPoly':
        return self + (-other)

    def __mul__(self, other) -> 'HomogeneousPoly':
        if isinstance(other, int):
            return HomogeneousPoly(self.degree, self.ring, tuple(other * a for a in self.coeffs))
        self._check(other)
        product = _convolve(self.coeffs, other.coeffs, self.ring.modulus)
        return HomogeneousPoly(self.degree + other.degree, self.ring, tuple(product))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> 'HomogeneousPoly':
        if e < 0:
            raise PreconditionError("negative power of a form")
        result = HomogeneousPoly.monomial(0, 0, self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def to_dict(self) -> Dict:
        return {'degree': self.degree, 'modulus': self.ring.modulus, 'coeffs': [str(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data: Dict) -> 'HomogeneousPoly':
        return cls(int(data['degree']), CoefficientRing(int(data['modulus'])), tuple(int(c) for c in data['coeffs']))

    def __str__(self) -> str:
        parts = []
        for v in range(self.degree, -1, -1):
            c = self.coeffs[v]
            if c:
                parts.append(f"{c}*X^{v}*Y^{self.degree - v}")
        return ' + '.join(parts) if parts else '0'


X = HomogeneousPoly.monomial(1, 0)
Y = HomogeneousPoly.monomial(0, 1)


def _times_linear(poly: List[int], x_coef: int, y_coef: int, modulus: int) -> List[int]:
    """Multiply a coefficient list (indexed by X-exponent) by x_coef*X + y_coef*Y."""
    out = [0] * (len(poly) + 1)
    if y_coef:
        for v, c in enumerate(poly):
            out[v] += y_coef * c
    if x_coef:
        for v, c in enumerate(poly):
            out[v + 1] += x_coef * c
    if modulus:
        out = [x % modulus for x in out]
    return out


def _substitute(coeffs: Sequence[int], a: int, b: int, c: int, d: int, modulus: int) -> List[int]:
    """sum_v c_v (aX + cY)^v (bX + dY)^(n-v) by Horner in the first linear form."""
    n = len(coeffs) - 1
    if (a, b, c, d) == (0, -1, 1, 0):
        # X^v Y^(n-v) -> Y^v (-X)^(n-v)
        out = [0] * (n + 1)
        for v, x in enumerate(coeffs):
            out[n - v] = -x if (n - v) % 2 else x
        return [x % modulus for x in out] if modulus else out
    horner = [coeffs[n]]
    second_power = [1]
    for v in range(n - 1, -1, -1):
        horner = _times_linear(horner, a, c, modulus)
        second_power = _times_linear(second_power, b, d, modulus)
        coefficient = coeffs[v]
        if coefficient:
            horner = [h + coefficient * s for h, s in zip(horner, second_power)]
            if modulus:
                horner = [x % modulus for x in horner]
    return horner


def substitute(P: HomogeneousPoly, a: int, b: int, c: int, d: int) -> HomogeneousPoly:
    """P(aX + cY, bX + dY) for an arbitrary integer matrix."""
    return HomogeneousPoly(P.degree, P.ring, tuple(_substitute(P.coeffs, a, b, c, d, P.ring.modulus)))


def act(g: UnimodularMatrix, P: HomogeneousPoly) -> HomogeneousPoly:
    """(g.P)(X, Y) = P(aX + cY, bX + dY)."""
    return HomogeneousPoly(P.degree, P.ring, tuple(_substitute(P.coeffs, g.a, g.b, g.c, g.d, P.ring.modulus)))


@functools.lru_cache(maxsize=256)
def action_matrix(g: UnimodularMatrix, n: int, ring: CoefficientRing = ZZ) -> IntMatrix:
    """Matrix M with coeffs(act(g, P)) = M @ coeffs(P) in the monomial basis."""
    columns = []
    for v in range(n + 1):
        unit = [0] * (n + 1)
        unit[v] = 1
        columns.append(_substitute(unit, g.a, g.b, g.c, g.d, ring.modulus))
    return IntMatrix.from_columns(columns, n + 1)


@dataclass(frozen=True)
class EpsilonVector:
    """Coordinates on eps_0, ..., eps_n in degree n."""
    degree: int
    coords: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.degree + 1:
            raise PreconditionError(f"degree {self.degree} needs {self.degree + 1} coordinates")

    def reduce(self, modulus: int) -> 'EpsilonVector':
        return EpsilonVector(self.degree, tuple(c % modulus for c in self.coords))

    @classmethod
    def basis(cls, degree: int, k: int) -> 'EpsilonVector':
        coords = [0] * (degree + 1)
        coords[k] = 1
        return cls(degree, tuple(coords))


@functools.lru_cache(maxsize=128)
def stirling2_change_matrix(n: int) -> IntMatrix:
    """Monomial coordinates -> eps coordinates: column v is X^v Y^(n-v) written in eps."""
    columns = []
    for v in range(n + 1):
        k = n - v
        columns.append([stirling2(k, j) for j in range(n + 1)])
    return IntMatrix.from_columns(columns, n + 1)


@functools.lru_cache(maxsize=128)
def epsilon_change_matrix(n: int) -> IntMatrix:
    """eps coordinates -> monomial coordinates: column k is eps_k in the monomial basis."""
    columns = []
    for k in range(n + 1):
        column = [0] * (n + 1)
        for j in range(k + 1):
            column[n - j] = stirling1_signed(k, j)  # X^(n-j) Y^j
        columns.append(column)
    return IntMatrix.from_columns(columns, n + 1)


def to_epsilon(P: HomogeneousPoly) -> EpsilonVector:
    if not P.ring.is_integral:
        raise PreconditionError("eps conversion is defined over Z; lift the form first")
    n = P.degree
    coords = [0] * (n + 1)
    for v, c in enumerate(P.coeffs):
        if c:
            k = n - v
            for j in range(1, k + 1):
                coords[j] += c * stirling2(k, j)
            if k == 0:
                coords[0] += c
    return EpsilonVector(n, tuple(coords))


def from_epsilon(vector: EpsilonVector, ring: CoefficientRing = ZZ) -> HomogeneousPoly:
    n = vector.degree
    coeffs = [0] * (n + 1)
    for k, c in enumerate(vector.coords):
        if c:
            for j in range(k + 1):
                s = stirling1_signed(k, j)
                if s:
                    coeffs[n - j] += c * s
    return HomogeneousPoly(n, ring, tuple(coeffs))


def epsilon(n: int, k: int, ring: CoefficientRing = ZZ) -> HomogeneousPoly:
    """eps_k in degree n as a form."""
    return from_epsilon(EpsilonVector.basis(n, k), ring)


def act_matrix_epsilon(g: UnimodularMatrix, n: int) -> IntMatrix:
    """Matrix of act(g, -) in the eps basis (over Z)."""
    return stirling2_change_matrix(n) @ action_matrix(g, n) @ epsilon_change_matrix(n)
