"""
Dickson invariants f_1, f_2 and their lifts f_(1,delta) = f_1^(p^(delta-1)), f_(2,delta) = f_2^(p^(delta-1)),
which are invariant mod p^delta of order p^delta.

Both forms are polynomials in u = X^(p-1), w = Y^(p-1) (times a power of XY for f_1),
so the powers are taken in u, w and expanded at the end.
"""
import functools
import logging
from dataclasses import dataclass
from itertools import product
from math import comb, gcd
from typing import Dict, List, Optional, Tuple

from sympy import isprime

from .errors import PreconditionError, RingMismatchError
from .exact_linalg import solve_mod_prime
from .models import CheckReport
from .polyspace import S, T, ZZ, CoefficientRing, HomogeneousPoly, act

logger = logging.getLogger(__name__)


def _check_prime(p: int):
    if not isprime(p) or p <= 3:
        raise PreconditionError(f"expected a prime p > 3, got {p}")


def _check_delta(delta: int):
    if delta < 1:
        raise PreconditionError(f"delta must be >= 1, got {delta}")


def _power_compressed(base: List[int], e: int) -> List[int]:
    result = [1]
    while e:
        if e & 1:
            result = _multiply(result, base)
        e >>= 1
        if e:
            base = _multiply(base, base)
    return result


def _multiply(f: List[int], g: List[int]) -> List[int]:
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if x:
            for j, y in enumerate(g):
                out[i + j] += x * y
    return out


def _expand(w_coeffs: List[int], stride: int, shift: int) -> HomogeneousPoly:
    """sum_i c_i u^(top-i) w^i, times (XY)^shift, with u = X^stride, w = Y^stride."""
    top = len(w_coeffs) - 1
    degree = stride * top + 2 * shift
    coeffs = [0] * (degree + 1)
    for i, c in enumerate(w_coeffs):
        coeffs[stride * (top - i) + shift] = c
    return HomogeneousPoly(degree, ZZ, tuple(coeffs))


@dataclass(frozen=True)
class DicksonPair:
    p: int
    delta: int
    f1: HomogeneousPoly
    f2: HomogeneousPoly

    def reduce(self, modulus: int) -> 'DicksonPair':
        return DicksonPair(self.p, self.delta, self.f1.reduce(modulus), self.f2.reduce(modulus))

    def monomial(self, a: int, b: int) -> HomogeneousPoly:
        return self.f1 ** a * self.f2 ** b


@functools.lru_cache(maxsize=32)
def dickson_pair(p: int, delta: int) -> DicksonPair:
    _check_prime(p)
    _check_delta(delta)
    N = p ** (delta - 1)
    # f1 = (XY)^N (u - w)^N
    f1 = _expand([(-1) ** i * comb(N, i) for i in range(N + 1)], p - 1, N)
    # f2 = (u^p + u^(p-1) w + ... + w^p)^N
    f2 = _expand(_power_compressed([1] * (p + 1), N), p - 1, 0)
    logger.debug(f"Dickson pair p={p} delta={delta}: degrees {f1.degree}, {f2.degree}")
    return DicksonPair(p=p, delta=delta, f1=f1, f2=f2)


def _to_modulus(P: HomogeneousPoly, m: int) -> HomogeneousPoly:
    if P.ring.modulus and P.ring.modulus % m:
        raise RingMismatchError(f"{P.ring} does not reduce to Z/{m}")
    return P.reduce(m)


def noninvariance_witness(P: HomogeneousPoly, p: int, delta: int) -> Optional[Dict]:
    """First nonzero coefficient of gP - P for g in (S, T), or None when P is invariant."""
    m = p ** delta
    P = _to_modulus(P, m)
    for name, g in (('S', S), ('T', T)):
        moved = act(g, P) - P
        for v, c in enumerate(moved.coeffs):
            if c:
                return {'generator': name, 'x_exp': v, 'y_exp': P.degree - v, 'coefficient': c}
    return None


def is_invariant(P: HomogeneousPoly, p: int, delta: int) -> bool:
    return noninvariance_witness(P, p, delta) is None


def additive_order(P: HomogeneousPoly) -> int:
    m = P.ring.modulus
    if m == 0:
        if P.is_zero():
            return 1
        raise PreconditionError("a nonzero form over Z has infinite order")
    g = m
    for c in P.coeffs:
        g = gcd(g, c)
    return m // g


def is_primitive(P: HomogeneousPoly, p: int, delta: int) -> bool:
    return additive_order(_to_modulus(P, p ** delta)) == p ** delta


def generator_exponents(p: int, delta: int, degree: int) -> List[Tuple[int, int]]:
    """All (a, b) with deg(f_1^a f_2^b) = degree."""
    d1 = p ** (delta - 1) * (p + 1)
    d2 = p ** delta * (p - 1)
    return [(a, (degree - a * d1) // d2) for a in range(degree // d1 + 1) if (degree - a * d1) % d2 == 0]


def primitive_ring_membership_mod_p(P: HomogeneousPoly, p: int, delta: int) -> Optional[Dict[Tuple[int, int], int]]:
    """
    Coefficients c_(a,b) with P = sum c_(a,b) f_(1,delta)^a f_(2,delta)^b mod p,
    or None when P mod p is outside that span.
    """
    m = p ** delta
    P = _to_modulus(P, m)
    witness = noninvariance_witness(P, p, delta)
    if witness is not None:
        raise PreconditionError(f"form is not invariant mod {m}: {witness}")
    if additive_order(P) != m:
        raise PreconditionError(f"form has order {additive_order(P)}, not {m}")
    pair = dickson_pair(p, delta).reduce(p)
    exponents = generator_exponents(p, delta, P.degree)
    columns = [pair.monomial(a, b).coeffs for a, b in exponents]
    solution = solve_mod_prime(columns, P.reduce(p).coeffs, p) if columns else None
    if solution is None:
        logger.warning(f"primitive invariant of degree {P.degree} mod {m} not in the Dickson ring mod {p}")
        return None
    return {ab: c for ab, c in zip(exponents, solution) if c}


def _leading_exponent(P: HomogeneousPoly) -> Tuple[int, int]:
    v = max(i for i, c in enumerate(P.coeffs) if c)
    return v, P.degree - v


def independence_witness(p: int, delta: int, bound: int = 4) -> bool:
    """Leading monomials of f_1^a f_2^b (a, b <= bound) are pairwise distinct."""
    pair = dickson_pair(p, delta)
    x1, y1 = _leading_exponent(pair.f1)
    x2, y2 = _leading_exponent(pair.f2)
    seen = {(a * x1 + b * x2, a * y1 + b * y2) for a, b in product(range(bound + 1), repeat=2)}
    return len(seen) == (bound + 1) ** 2


def dickson_identity_check(p: int) -> bool:
    """X^(p^2-1) = X^(p-1) f_2 - f_1^(p-1) mod p."""
    pair = dickson_pair(p, 1).reduce(p)
    ring = CoefficientRing(p)
    lhs = HomogeneousPoly.monomial(p * p - 1, 0, ring)
    rhs = HomogeneousPoly.monomial(p - 1, 0, ring) * pair.f2 - pair.f1 ** (p - 1)
    return lhs == rhs


def dickson_verify(p: int, delta: int) -> CheckReport:
    """Invariance and order of f_(1,delta), f_(2,delta), and failure of invariance for f_1 below."""
    report = CheckReport(name=f"dickson p={p} delta={delta}")
    m = p ** delta
    pair = dickson_pair(p, delta)
    candidates = [('f1', pair.f1), ('f2', pair.f2)]
    if delta <= 2:
        candidates.append(('f1*f2', pair.f1 * pair.f2))
    for name, P in candidates:
        reduced = P.reduce(m)
        witness = noninvariance_witness(reduced, p, delta)
        order = additive_order(reduced)
        ok = witness is None and order == m
        if witness is not None:
            report.fail(f"{name} is not invariant mod {m}: {witness}")
        elif order != m:
            report.fail(f"{name} has order {order} mod {m}")
        report.rows.append({'p': p, 'delta': delta, 'name': name, 'degree': P.degree,
                            'invariant': witness is None, 'order': order, 'ok': ok})
    if delta >= 2:
        base = dickson_pair(p, 1).f1
        invariant = is_invariant(base, p, delta)
        if invariant:
            report.fail(f"f1 is unexpectedly invariant mod {m}")
        report.rows.append({'p': p, 'delta': delta, 'name': 'f1 (unlifted)', 'degree': base.degree,
                            'invariant': invariant, 'order': additive_order(base.reduce(m)), 'ok': not invariant})
    if not independence_witness(p, delta):
        report.fail("leading monomials of generator products collide")
    logger.info(f"Dickson check p={p} delta={delta}: {'ok' if report.ok else 'FAILED'}")
    return report
