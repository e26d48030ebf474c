"""
Graded coinvariants Z/p^delta[X, Y] / I, with I the augmentation ideal of SL2(Z/p^delta).

Degree d is the cokernel of [(S - Id) | (T - Id)] on M_d over Z/p^delta; the class of a
form is tracked by appending it as an extra column and comparing group orders.
"""
import functools
import logging
from typing import Callable, List, Optional, Tuple

from sympy import isprime

from .combinat import p_valuation
from .divpow import pairing, u_delta
from .errors import PreconditionError
from .exact_linalg import IntMatrix, cokernel_mod
from .invariants import dickson_pair, dickson_identity_check
from .models import AbelianGroupStructure, CheckReport, HilbertSeries
from .polyspace import S, T, CoefficientRing, HomogeneousPoly, action_matrix, epsilon

logger = logging.getLogger(__name__)

# Coinvariant degrees above this are out of desk range for the dense elimination.
MAX_DEGREE = 200


def _check(p: int, delta: int, d: int = 0):
    if not isprime(p) or p <= 3:
        raise PreconditionError(f"expected a prime p > 3, got {p}")
    if delta < 1:
        raise PreconditionError(f"delta must be >= 1, got {delta}")
    if not 0 <= d <= MAX_DEGREE:
        raise PreconditionError(f"degree {d} outside 0..{MAX_DEGREE}")


@functools.lru_cache(maxsize=512)
def relation_matrix(p: int, delta: int, d: int) -> IntMatrix:
    ring = CoefficientRing(p ** delta)
    identity = IntMatrix.identity(d + 1)
    return (action_matrix(S, d, ring) - identity).hstack(action_matrix(T, d, ring) - identity)


@functools.lru_cache(maxsize=512)
def coinvariants_degree(p: int, delta: int, d: int) -> AbelianGroupStructure:
    _check(p, delta, d)
    structure = cokernel_mod(relation_matrix(p, delta, d), p ** delta)
    logger.debug(f"coinvariants p={p} delta={delta} d={d}: {structure}")
    return structure


def class_order_in_coinvariants(P: HomogeneousPoly, p: int, delta: int) -> int:
    """Additive order of the image of P in the degree-d coinvariants."""
    m = p ** delta
    base = coinvariants_degree(p, delta, P.degree)
    column = IntMatrix.from_columns([P.reduce(m).coeffs], P.degree + 1)
    augmented = cokernel_mod(relation_matrix(p, delta, P.degree).hstack(column), m)
    return base.order() // augmented.order()


def hilbert_closed_form(p: int, delta: int, d_max: int) -> List[int]:
    """Coefficients of the closed-form Hilbert series up to t^d_max."""
    coefficients = [0] * (d_max + 1)
    coefficients[0] = 1

    def add_term(shift: int, steps: Tuple[int, ...]):
        # t^shift / prod (1 - t^s)
        series = [0] * (d_max + 1)
        if shift <= d_max:
            series[shift] = 1
        for s in steps:
            for i in range(s, d_max + 1):
                series[i] += series[i - s]
        for i, c in enumerate(series):
            coefficients[i] += c

    if delta == 1:
        add_term(2 * (p - 1), (p - 1,))
        add_term(p * (p + 1), (p + 1, p * (p - 1)))
    else:
        add_term(p ** (delta + 1) + p ** (delta - 1) - 2, (p ** (delta - 1) * (p + 1), p ** delta * (p - 1)))
    return coefficients


def hilbert_series(p: int, delta: int, d_max: int,
                   structure_of: Optional[Callable[[int], AbelianGroupStructure]] = None) -> HilbertSeries:
    """Z/p^delta-ranks of the coinvariants in degrees 0..d_max; structure_of(d) may replace the direct computation."""
    _check(p, delta, d_max)
    structure_of = structure_of or (lambda d: coinvariants_degree(p, delta, d))
    ranks, divisors = [], []
    for d in range(d_max + 1):
        structure = structure_of(d)
        ranks.append(structure.rank_m)
        divisors.append(list(structure.torsion))
    return HilbertSeries(p=p, delta=delta, coefficients=ranks, divisors=divisors)


def hilbert_check(p: int, delta: int, d_max: int,
                  structure_of: Optional[Callable[[int], AbelianGroupStructure]] = None) -> CheckReport:
    report = CheckReport(name=f"hilbert p={p} delta={delta} dmax={d_max}")
    series = hilbert_series(p, delta, d_max, structure_of)
    expected = hilbert_closed_form(p, delta, d_max)
    first_mismatch = None
    for d, (rank, target) in enumerate(zip(series.coefficients, expected)):
        ok = rank == target
        if not ok:
            report.fail(f"degree {d}: rank {rank}, closed form {target}")
            if first_mismatch is None:
                first_mismatch = d
        report.rows.append({'p': p, 'delta': delta, 'd': d, 'rank': rank, 'expected': target,
                            'divisors': series.divisors[d], 'ok': ok})
    report.details = {'first_mismatch': first_mismatch, 'coefficients': series.coefficients}
    logger.info(f"Hilbert series p={p} delta={delta} up to {d_max}: {'ok' if report.ok else 'FAILED'}")
    return report


def vanishing_monomial_check(p: int, delta: int, a: int, b: int) -> bool:
    """X^a Y^b is 0 when (p-1) does not divide a-b, else killed by p^(r+1), r = val_p((a-b)/(p-1))."""
    _check(p, delta, a + b)
    order = class_order_in_coinvariants(HomogeneousPoly.monomial(a, b, CoefficientRing(p ** delta)), p, delta)
    if (a - b) % (p - 1):
        return order == 1
    if a == b:
        return True
    r = int(p_valuation((a - b) // (p - 1), p))
    return (p ** (r + 1)) % order == 0


def primitive_generator_monomial(p: int, delta: int) -> HomogeneousPoly:
    """U_delta = X^(p^(delta+1) - p^delta + p^(delta-1) - 1) Y^(p^delta - 1) over Z/p^delta."""
    x_exp = p ** (delta + 1) - p ** delta + p ** (delta - 1) - 1
    y_exp = p ** delta - 1
    return HomogeneousPoly.monomial(x_exp, y_exp, CoefficientRing(p ** delta))


def _nonzero(P: HomogeneousPoly, p: int) -> bool:
    return class_order_in_coinvariants(P, p, 1) > 1


def _monomial_name(Q: HomogeneousPoly) -> str:
    (x, y), = Q.terms()
    return f"X^{x}Y^{y}"


def decomposition_witness_mod_p(p: int, powers: int = 2) -> CheckReport:
    """Annihilation by f_1, non-annihilation by f_2, and freeness samples in the coinvariants mod p."""
    if p not in (5, 7):
        raise PreconditionError(f"decomposition witness is run for p in (5, 7), got {p}")
    report = CheckReport(name=f"decomposition p={p}")
    ring = CoefficientRing(p)
    pair = dickson_pair(p, 1).reduce(p)
    one = HomogeneousPoly.monomial(0, 0, ring)
    torsion_classes = [one] + [HomogeneousPoly.monomial((k - 1) * (p - 1), p - 1, ring) for k in range(2, p)]

    def record(label: str, ok: bool):
        if not ok:
            report.fail(label)
        report.rows.append({'p': p, 'check': label, 'ok': ok})

    for Q in torsion_classes:
        name = _monomial_name(Q)
        record(f"f1 * {name} = 0", not _nonzero(pair.f1 * Q, p))
        for j in range(powers + 1):
            record(f"f2^{j} * {name} != 0", _nonzero(pair.f2 ** j * Q, p))
    free_generator = HomogeneousPoly.monomial(p * p - p, p - 1, ring)
    for a in range(powers + 1):
        for b in range(powers + 1 - a):
            record(f"f1^{a} f2^{b} X^{p * p - p}Y^{p - 1} != 0", _nonzero(pair.monomial(a, b) * free_generator, p))
    record(f"eps_{p - 1} in degree {p * (p - 1)} = 0", not _nonzero(epsilon(p * (p - 1), p - 1).reduce(p), p))
    for i in range(1, 2 * (p - 1)):
        if i % (p - 1):
            record(f"X^{i}Y^{p - 1} = 0", vanishing_monomial_check(p, 1, i, p - 1))
    record("X^(p^2-1) = X^(p-1) f2 - f1^(p-1)", dickson_identity_check(p))
    logger.info(f"Decomposition witness p={p}: {'ok' if report.ok else 'FAILED'}")
    return report


def _product_samples(p: int, delta: int) -> List[Tuple[int, int]]:
    if delta >= 2:
        return [(1, 0)]
    if p == 5:
        return [(1, 0), (0, 1), (2, 0), (1, 1)]
    return [(1, 0)]


def primitive_generator_check(p: int, delta: int) -> CheckReport:
    if (p, delta) not in ((5, 1), (5, 2), (7, 1)):
        raise PreconditionError(f"primitive generator check is run for (5, 1), (5, 2), (7, 1), got {(p, delta)}")
    m = p ** delta
    report = CheckReport(name=f"primitive generator p={p} delta={delta}")
    U = primitive_generator_monomial(p, delta)
    order = class_order_in_coinvariants(U, p, delta)
    rank = coinvariants_degree(p, delta, U.degree).rank_m
    rows = [('U order', order, order == m), ('critical rank', rank, rank == 1)]
    pair = dickson_pair(p, delta).reduce(m)
    for a, b in _product_samples(p, delta):
        product_order = class_order_in_coinvariants(pair.monomial(a, b) * U, p, delta)
        rows.append((f"f1^{a} f2^{b} U order", product_order, product_order == m))
    for label, value, ok in rows:
        if not ok:
            report.fail(f"{label} is {value}")
        report.rows.append({'p': p, 'delta': delta, 'check': label, 'value': value, 'ok': ok})
    report.details = {'degree': U.degree, 'x_exp': U.degree - (p ** delta - 1), 'y_exp': p ** delta - 1}
    logger.info(f"Primitive generator p={p} delta={delta}: {'ok' if report.ok else 'FAILED'}")
    return report


def pairing_value(p: int, delta: int, r: int, a: int) -> int:
    """<u_(delta+r), f_(1,delta)^(p^r-1+a p(p-1)) f_(2,delta)^(p^r-1-a(p+1)) U_delta> mod p."""
    e1 = p ** r - 1 + a * p * (p - 1)
    e2 = p ** r - 1 - a * (p + 1)
    if e1 < 0 or e2 < 0:
        raise PreconditionError(f"negative exponent ({e1}, {e2}) for r={r}, a={a}")
    pair = dickson_pair(p, delta).reduce(p)
    form = pair.monomial(e1, e2) * primitive_generator_monomial(p, delta).reduce(p)
    return pairing(u_delta(p, delta + r), form)


def lemma_pairing_unit(p: int, delta: int, r: int) -> int:
    return pairing_value(p, delta, r, 0)


def pairing_vanishing_check(p: int, delta: int, r: int, a: int) -> bool:
    if a < 1:
        raise PreconditionError(f"a must be positive, got {a}")
    return pairing_value(p, delta, r, a) == 0

