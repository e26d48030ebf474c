"""
Divided-power algebra D(V) in xi_1, xi_2, dual to the polynomial ring under
<xi_1^(m) xi_2^(n), X^m Y^n> = 1.

Elements are dense in the xi_2 exponent: coeffs[j] multiplies xi_1^(d-j) xi_2^(j).
g = [[a, b], [c, d]] acts by f(a xi_1 + b xi_2, c xi_1 + d xi_2), which makes
<g f, P> = <f, g P>.
"""
import logging
from dataclasses import dataclass
from math import comb, gcd
from typing import Dict, Optional, Tuple

from sympy import isprime

from .combinat import stirling2, stirling2_column_mod
from .errors import PreconditionError, RingMismatchError
from .exact_linalg import IntMatrix, class_order
from .models import CheckReport
from .polyspace import S, T, ZZ, CoefficientRing, HomogeneousPoly, UnimodularMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DividedPowerElement:
    degree: int
    ring: CoefficientRing
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise PreconditionError(f"degree {self.degree} needs {self.degree + 1} coefficients, got {len(self.coeffs)}")
        object.__setattr__(self, 'coeffs', tuple(self.ring.reduce(int(c)) for c in self.coeffs))

    @classmethod
    def basis(cls, x1: int, x2: int, ring: CoefficientRing = ZZ) -> 'DividedPowerElement':
        """xi_1^(x1) xi_2^(x2)."""
        coeffs = [0] * (x1 + x2 + 1)
        coeffs[x2] = 1
        return cls(x1 + x2, ring, tuple(coeffs))

    @classmethod
    def from_terms(cls, degree: int, terms: Dict[Tuple[int, int], int], ring: CoefficientRing = ZZ) -> 'DividedPowerElement':
        coeffs = [0] * (degree + 1)
        for (x1, x2), c in terms.items():
            if x1 + x2 != degree:
                raise PreconditionError(f"term xi_1^({x1}) xi_2^({x2}) is not of degree {degree}")
            coeffs[x2] += c
        return cls(degree, ring, tuple(coeffs))

    def terms(self) -> Dict[Tuple[int, int], int]:
        return {(self.degree - j, j): c for j, c in enumerate(self.coeffs) if c}

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def reduce(self, modulus: int) -> 'DividedPowerElement':
        return DividedPowerElement(self.degree, CoefficientRing(modulus), self.coeffs)

    def _check(self, other: 'DividedPowerElement'):
        if self.ring != other.ring:
            raise RingMismatchError(f"cannot combine {self.ring} with {other.ring}")

    def __add__(self, other: 'DividedPowerElement') -> 'DividedPowerElement':
        self._check(other)
        if self.degree != other.degree:
            raise PreconditionError(f"cannot add degrees {self.degree} and {other.degree}")
        return DividedPowerElement(self.degree, self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> 'DividedPowerElement':
        return DividedPowerElement(self.degree, self.ring, tuple(-a for a in self.coeffs))

    def __sub__(self, other: 'DividedPowerElement') -> 'DividedPowerElement':
        return self + (-other)

    def scale(self, c: int) -> 'DividedPowerElement':
        return DividedPowerElement(self.degree, self.ring, tuple(c * a for a in self.coeffs))

    def __mul__(self, other: 'DividedPowerElement') -> 'DividedPowerElement':
        return dp_multiply(self, other)


def dp_multiply(f: DividedPowerElement, g: DividedPowerElement) -> DividedPowerElement:
    f._check(g)
    degree = f.degree + g.degree
    out = [0] * (degree + 1)
    for i, x in enumerate(f.coeffs):
        if not x:
            continue
        for j, y in enumerate(g.coeffs):
            if y:
                # xi_1 exponents (f.degree - i) + (g.degree - j), xi_2 exponents i + j
                out[i + j] += x * y * comb(degree - i - j, g.degree - j) * comb(i + j, j)
    return DividedPowerElement(degree, f.ring, tuple(out))


def _power(x: int, e: int, modulus: int) -> int:
    return pow(x, e, modulus) if modulus else x ** e


def dp_act(g: UnimodularMatrix, f: DividedPowerElement) -> DividedPowerElement:
    d = f.degree
    m = f.ring.modulus
    out = [0] * (d + 1)
    if g == S:
        # xi_1^(a) xi_2^(b) -> (-1)^a xi_1^(b) xi_2^(a)
        for j, c in enumerate(f.coeffs):
            out[d - j] = -c if (d - j) % 2 else c
        return DividedPowerElement(d, f.ring, tuple(out))
    if g == T:
        # (xi_1 + xi_2)^(a) xi_2^(b) = sum_i binom(a - i + b, b) xi_1^(i) xi_2^(a + b - i)
        for j, c in enumerate(f.coeffs):
            if c:
                a = d - j
                for i in range(a + 1):
                    out[d - i] += c * comb(a - i + j, j)
        return DividedPowerElement(d, f.ring, tuple(out))
    for j, c in enumerate(f.coeffs):
        if not c:
            continue
        x1, x2 = d - j, j
        for i in range(x1 + 1):
            # (a xi_1 + b xi_2)^(x1) contributes xi_1^(i) xi_2^(x1-i)
            first = _power(g.a, i, m) * _power(g.b, x1 - i, m)
            if not first:
                continue
            for k in range(x2 + 1):
                # (c xi_1 + d xi_2)^(x2) contributes xi_1^(k) xi_2^(x2-k)
                second = _power(g.c, k, m) * _power(g.d, x2 - k, m)
                if second:
                    out[d - i - k] += c * first * second * comb(i + k, i) * comb(d - i - k, x1 - i)
    return DividedPowerElement(d, f.ring, tuple(out))


def _common_modulus(first: CoefficientRing, second: CoefficientRing) -> int:
    if first.modulus and second.modulus and first.modulus != second.modulus:
        raise RingMismatchError(f"cannot pair {first} with {second}")
    return first.modulus or second.modulus


def pairing(f: DividedPowerElement, P: HomogeneousPoly) -> int:
    if f.degree != P.degree:
        raise PreconditionError(f"cannot pair degree {f.degree} with degree {P.degree}")
    m = _common_modulus(f.ring, P.ring)
    d = f.degree
    value = sum(c * P.coeffs[d - j] for j, c in enumerate(f.coeffs) if c)
    return value % m if m else value


def dp_is_invariant(f: DividedPowerElement) -> bool:
    return dp_act(S, f) == f and dp_act(T, f) == f


def dp_additive_order(f: DividedPowerElement) -> int:
    m = f.ring.modulus
    if m == 0:
        if f.is_zero():
            return 1
        raise PreconditionError("a nonzero element over Z has infinite order")
    g = m
    for c in f.coeffs:
        g = gcd(g, c)
    return m // g


def nu_element(d: int, i: int, ring: CoefficientRing = ZZ) -> DividedPowerElement:
    """nu_i = sum_(j >= i) {j, i} xi_1^(d-j) xi_2^(j)."""
    if not 0 <= i <= d:
        raise PreconditionError(f"need 0 <= i <= d, got i={i}, d={d}")
    if ring.modulus:
        column = stirling2_column_mod(i, d, ring.modulus)
        coeffs = [column[j] if j >= i else 0 for j in range(d + 1)]
    else:
        coeffs = [stirling2(j, i) for j in range(d + 1)]
    return DividedPowerElement(d, ring, tuple(coeffs))


def _check_prime_delta(p: int, delta: int):
    if not isprime(p) or p <= 3:
        raise PreconditionError(f"expected a prime p > 3, got {p}")
    if delta < 1:
        raise PreconditionError(f"delta must be >= 1, got {delta}")


def u_delta_degree(p: int, delta: int) -> int:
    return p ** (delta + 1) + p ** (delta - 1) - 2


def u_delta(p: int, delta: int) -> DividedPowerElement:
    _check_prime_delta(p, delta)
    q = p ** (delta - 1)
    terms = {}
    for j in range(1, p + 1):
        x1 = q - 1 + j * q * (p - 1)
        x2 = q - 1 + (p - j + 1) * q * (p - 1)
        terms[(x1, x2)] = 1
    return DividedPowerElement.from_terms(u_delta_degree(p, delta), terms, CoefficientRing(p))


def divel_element(p: int, n_blocks: int, ring: Optional[CoefficientRing] = None) -> DividedPowerElement:
    """sum_(k=1)^(n-1) xi_1^(k(p-1)) xi_2^((n-k)(p-1))."""
    if n_blocks < 2:
        raise PreconditionError(f"need at least two blocks, got {n_blocks}")
    ring = ring or CoefficientRing(p)
    terms = {(k * (p - 1), (n_blocks - k) * (p - 1)): 1 for k in range(1, n_blocks)}
    return DividedPowerElement.from_terms(n_blocks * (p - 1), terms, ring)


def w2_element(p: int) -> DividedPowerElement:
    """sum_j {j, p^2 - 1} xi_1^(d-j) xi_2^(j) over Z/p^2, for p^2 - 1 <= j <= d - p^2 + 1."""
    _check_prime_delta(p, 2)
    q = p * p
    d = u_delta_degree(p, 2)
    column = stirling2_column_mod(q - 1, d, q)
    coeffs = [column[j] if q - 1 <= j <= d - q + 1 else 0 for j in range(d + 1)]
    return DividedPowerElement(d, CoefficientRing(q), tuple(coeffs))


def nu_difference_check(p: int, delta: int) -> bool:
    """u_delta = nu_(p^delta - 1) - nu_(p^(delta+1) - 1) mod p."""
    u = u_delta(p, delta)
    ring = CoefficientRing(p)
    difference = nu_element(u.degree, p ** delta - 1, ring) - nu_element(u.degree, p ** (delta + 1) - 1, ring)
    return difference == u


def nu_shift_check(d: int, i: int) -> bool:
    """(T - Id) nu_i = (i+1) nu_(i+1) over Z."""
    nu = nu_element(d, i)
    lhs = dp_act(T, nu) - nu
    rhs = nu_element(d, i + 1).scale(i + 1) if i < d else DividedPowerElement(d, ZZ, (0,) * (d + 1))
    return lhs == rhs


def _t_minus_identity(d: int) -> IntMatrix:
    columns = []
    for j in range(d + 1):
        unit = DividedPowerElement(d, ZZ, tuple(1 if k == j else 0 for k in range(d + 1)))
        image = dp_act(T, unit) - unit
        columns.append(list(image.coeffs))
    return IntMatrix.from_columns(columns, d + 1)


def nu_order_check(d: int) -> CheckReport:
    """The class of nu_i in D_d / (T - Id) D_d has order exactly i."""
    report = CheckReport(name=f"nu orders d={d}")
    relation = _t_minus_identity(d)
    for i in range(1, d + 1):
        order = class_order(relation, nu_element(d, i).coeffs)
        if order != i:
            report.fail(f"class of nu_{i} has order {order}, expected {i}")
        report.rows.append({'d': d, 'i': i, 'order': order, 'ok': order == i})
    return report


def divpow_suite(p: int, delta: int) -> CheckReport:
    """Invariance of u_delta, of the divel elements (and w_2 when delta = 2) and the nu-difference identity."""
    report = CheckReport(name=f"divided powers p={p} delta={delta}")
    u = u_delta(p, delta)
    checks = {
        'u invariant mod p': dp_is_invariant(u),
        'u = nu difference': nu_difference_check(p, delta),
    }
    for n_blocks in (2, 3, 4):
        checks[f"divel_{n_blocks} invariant mod p"] = dp_is_invariant(divel_element(p, n_blocks))
    if delta == 2:
        w = w2_element(p)
        checks['w2 invariant mod p^2'] = dp_is_invariant(w)
        checks['w2 primitive'] = dp_additive_order(w) == p * p
        checks['w2 = u2 mod p'] = w.reduce(p) == u
    for name, ok in checks.items():
        if not ok:
            report.fail(name)
        report.rows.append({'p': p, 'delta': delta, 'check': name, 'ok': ok})
    logger.info(f"Divided-power suite p={p} delta={delta}: {'ok' if report.ok else 'FAILED'}")
    return report
