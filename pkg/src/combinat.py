"""
Stirling numbers, binomials and p-adic valuations, plus the congruence and
valuation statements about them as checkable predicates.
"""
import functools
import logging
import math
import threading
from math import comb
from typing import Dict, List, Optional, Tuple, Union

from sympy import isprime, multiplicity

from .errors import PreconditionError
from .models import CheckReport

logger = logging.getLogger(__name__)


@functools.total_ordering
class PValuation:
    """val_p(n); the valuation of 0 is +infinity."""

    __slots__ = ('p', 'value')

    def __init__(self, p: int, value: Union[int, float]):
        if not isprime(p):
            raise PreconditionError(f"valuation needs a prime, got {p}")
        self.p = p
        self.value = value

    @property
    def is_infinite(self) -> bool:
        return self.value == math.inf

    def _other(self, other) -> Union[int, float]:
        return other.value if isinstance(other, PValuation) else other

    def __eq__(self, other) -> bool:
        return self.value == self._other(other)

    def __lt__(self, other) -> bool:
        return self.value < self._other(other)

    def __hash__(self) -> int:
        return hash((self.p, self.value))

    def __int__(self) -> int:
        if self.is_infinite:
            raise OverflowError("valuation of zero is infinite")
        return int(self.value)

    def __repr__(self) -> str:
        return f"PValuation(p={self.p}, value={'inf' if self.is_infinite else self.value})"


def p_valuation(n: int, p: int) -> PValuation:
    if n == 0:
        return PValuation(p, math.inf)
    return PValuation(p, int(multiplicity(p, abs(n))))


class _TriangleCache:
    """Row-by-row table of a triangular recurrence; rows are only ever appended."""

    def __init__(self, step):
        self._rows: List[List[int]] = [[1]]
        self._step = step
        self._lock = threading.Lock()

    def row(self, n: int) -> List[int]:
        if n >= len(self._rows):
            with self._lock:
                while len(self._rows) <= n:
                    m = len(self._rows)
                    self._rows.append(self._step(m, self._rows[-1]))
        return self._rows[n]


def _stirling2_step(n: int, prev: List[int]) -> List[int]:
    # {n,k} = k{n-1,k} + {n-1,k-1}
    return [0] + [k * (prev[k] if k < len(prev) else 0) + prev[k - 1] for k in range(1, n + 1)]


def _stirling1_step(n: int, prev: List[int]) -> List[int]:
    # s(n,k) = s(n-1,k-1) - (n-1) s(n-1,k)
    return [0] + [prev[k - 1] - (n - 1) * (prev[k] if k < len(prev) else 0) for k in range(1, n + 1)]


_STIRLING2 = _TriangleCache(_stirling2_step)
_STIRLING1 = _TriangleCache(_stirling1_step)


def _check_indices(n: int, k: int):
    if n < 0 or k < 0:
        raise PreconditionError(f"Stirling indices must be non-negative, got ({n}, {k})")


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind {n, k}."""
    _check_indices(n, k)
    if k > n:
        return 0
    return _STIRLING2.row(n)[k]


def stirling1_signed(k: int, j: int) -> int:
    """Signed Stirling number of the first kind: x(x-1)...(x-k+1) = sum_j s(k,j) x^j."""
    _check_indices(k, j)
    if j > k:
        return 0
    return _STIRLING1.row(k)[j]


@functools.lru_cache(maxsize=64)
def stirling2_column_mod(k: int, n_max: int, m: int) -> Tuple[int, ...]:
    """({0,k}, {1,k}, ..., {n_max,k}) reduced mod m."""
    _check_indices(n_max, k)
    row = [1] + [0] * k
    column = [row[k] % m]
    for _ in range(n_max):
        row = [0] + [(j * row[j] + row[j - 1]) % m for j in range(1, k + 1)]
        column.append(row[k])
    return tuple(column)


def stirling2_mod(n: int, k: int, m: int) -> int:
    return stirling2_column_mod(k, n, m)[n]


def stirling2_generating_check(k: int, order: int) -> bool:
    """sum_r {r,k} X^(r-k) = 1/((1-X)(1-2X)...(1-kX)) up to X^(order-1)."""
    series = [1] + [0] * (order - 1)
    for j in range(1, k + 1):
        # multiply by 1/(1 - jX)
        for i in range(1, order):
            series[i] += j * series[i - 1]
    return all(series[i] == stirling2(k + i, k) for i in range(order))


def _valuation_at_least(residue: int, p: int, bound: int) -> bool:
    """Does the integer with this residue mod p^e (e > bound) have valuation >= bound?"""
    return bound <= 0 or residue % p ** bound == 0


def _check_prime(p: int, minimum: int = 2):
    if not isprime(p) or p < minimum:
        raise PreconditionError(f"expected a prime >= {minimum}, got {p}")


@functools.lru_cache(maxsize=16)
def corstir_table(p: int) -> Dict:
    """
    Residues mod p of {p^2 - tp, kp - 1}, {t(p-1), kp - 1} and {p^2 - 1, kp - 1}
    for 1 <= t, k <= p, together with the predicted value and whether all agree.
    """
    _check_prime(p, 5)
    families = {'p2_minus_tp': {}, 't_p_minus_1': {}, 'p2_minus_1': {}}
    holds = True

    def record(family, key, n, k, expected):
        nonlocal holds
        residue = stirling2(n, k) % p if n >= 0 else 0
        families[family][key] = residue
        if residue != expected:
            holds = False
            logger.warning(f"{family} {key}: {{{n},{k}}} = {residue} mod {p}, expected {expected}")

    for t in range(1, p + 1):
        for k in range(1, p + 1):
            n = p * p - t * p
            if n >= k * p - 1:
                record('p2_minus_tp', (t, k), n, k * p - 1, 1 if (t, k) == (1, 1) else 0)
            record('t_p_minus_1', (t, k), t * (p - 1), k * p - 1, 1 if k == 1 else 0)
    for k in range(1, p + 1):
        record('p2_minus_1', (k,), p * p - 1, k * p - 1, 1 if k in (1, p) else 0)
    return {'p': p, 'families': families, 'holds': holds}


def stirl_valuation_check(n: int, p: int, delta: int) -> bool:
    """val_p({n, p^delta - 1}) >= delta - 1 - val_p(n + 1)."""
    _check_prime(p, 5)
    if delta < 1 or n < p ** delta - 1:
        raise PreconditionError(f"need delta >= 1 and n >= p^delta - 1, got n={n}, delta={delta}")
    bound = delta - 1 - int(p_valuation(n + 1, p))
    residue = stirling2_mod(n, p ** delta - 1, p ** delta)
    return _valuation_at_least(residue, p, bound)


def stirling_ppower_congruence(n: int, m: int, p: int) -> int:
    """Closed form of {n, p^m} mod p^m."""
    _check_prime(p, 3)
    if m < 1 or n < p ** m:
        raise PreconditionError(f"need m >= 1 and n >= p^m, got n={n}, m={m}")
    if (n - 1) % (p - 1):
        return 0
    top = (n - p ** (m - 1)) // (p - 1) - 1
    bottom = (n - p ** m) // (p - 1)
    return comb(top, bottom) % p ** m


def stirling_shift_congruence(n: int, m: int, p: int) -> bool:
    """{n-1, p^m - 1} == {n, p^m} mod p^m."""
    _check_prime(p, 3)
    if m < 1 or n < p ** m:
        raise PreconditionError(f"need m >= 1 and n >= p^m, got n={n}, m={m}")
    q = p ** m
    return stirling2_mod(n - 1, q - 1, q) == stirling2_mod(n, q, q)


def binom_valuation_check(n: int, m: int, p: int) -> bool:
    if n < 1 or m < 1:
        raise PreconditionError(f"need n, m >= 1, got n={n}, m={m}")
    bound = m - int(p_valuation(n, p))
    ok = p_valuation(comb(n - 1 + p ** m, n), p) >= bound
    if n <= p ** m:
        ok = ok and p_valuation(comb(p ** m, n), p) >= bound
    return ok


def lucas_check(m: int, n: int, p: int) -> bool:
    """binom(m, n) mod p equals the product of digit binomials in base p."""
    _check_prime(p)
    product, a, b = 1, m, n
    while a or b:
        product = product * comb(a % p, b % p) % p
        a, b = a // p, b // p
    return comb(m, n) % p == product


def unit_power_valuation_check(j: int, gamma: int, p: int) -> bool:
    """val_p((1 - p^gamma)^j - 1) >= val_p(j) + gamma, with equality unless p = 2, gamma = 1."""
    _check_prime(p)
    if j < 1 or gamma < 1:
        raise PreconditionError(f"need j, gamma >= 1, got j={j}, gamma={gamma}")
    value = p_valuation((1 - p ** gamma) ** j - 1, p)
    bound = int(p_valuation(j, p)) + gamma
    if p > 2 or gamma >= 2:
        return value == bound
    return value >= bound


def binomial_sum_identity(j: int, p: int) -> bool:
    """sum of binom(j, k) over 1 <= k <= j-1 with (p-1) | k vanishes mod p."""
    return sum(comb(j, k) for k in range(p - 1, j, p - 1)) % p == 0


def stirling_sweep(p: int, delta: int, n_max: Optional[int] = None) -> CheckReport:
    """Run the valuation and congruence predicates over a range of n."""
    q = p ** delta
    n_max = n_max if n_max is not None else q + 3 * q
    report = CheckReport(name=f"stirling p={p} delta={delta}")
    counts = {'valuation': 0, 'ppower': 0, 'shift': 0, 'binom': 0, 'unit_power': 0, 'lucas': 0}

    lower = stirling2_column_mod(q - 1, n_max, q)
    upper = stirling2_column_mod(q, n_max, q)
    for n in range(q - 1, n_max + 1):
        bound = delta - 1 - int(p_valuation(n + 1, p))
        if not _valuation_at_least(lower[n], p, bound):
            report.fail(f"valuation bound fails at n={n}")
        counts['valuation'] += 1
        if n >= q:
            if stirling_ppower_congruence(n, delta, p) != upper[n]:
                report.fail(f"p-power congruence fails at n={n}")
            if lower[n - 1] != upper[n]:
                report.fail(f"shift congruence fails at n={n}")
            counts['ppower'] += 1
            counts['shift'] += 1
    for n in range(1, q + 1):
        if not binom_valuation_check(n, delta, p):
            report.fail(f"binomial valuation fails at n={n}")
        counts['binom'] += 1
    for j in range(1, 3 * p + 1):
        if not unit_power_valuation_check(j, delta, p):
            report.fail(f"unit power valuation fails at j={j}")
        counts['unit_power'] += 1
    for m in range(min(n_max, 2 * p * p) + 1):
        for n in range(m + 1):
            if not lucas_check(m, n, p):
                report.fail(f"Lucas digit product fails at binom({m}, {n})")
            counts['lucas'] += 1
    report.details = counts
    report.rows.append({'p': p, 'delta': delta, 'n_max': n_max, **counts, 'ok': report.ok})
    logger.info(f"Stirling sweep p={p} delta={delta} up to n={n_max}: {'ok' if report.ok else 'FAILED'}")
    return report
