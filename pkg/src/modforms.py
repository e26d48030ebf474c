"""
Level-one modular forms as exact truncated q-expansions: Eisenstein series, Delta,
the Miller basis of S_k, Hecke matrices, and the Eisenstein congruences coming from
boundary torsion. The weight is k = n + 2 for coefficient degree n.
"""
import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from numbers import Rational
from typing import Dict, List, Optional, Tuple

from sympy import Matrix, Poly, divisor_sigma, isprime, primerange, resultant, symbols, totient

from .cohomology import good_primes
from .combinat import p_valuation
from .errors import InsufficientPrecisionError, PreconditionError
from .models import CheckReport, CongruencePrediction

logger = logging.getLogger(__name__)

x, alpha = symbols('x alpha')


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


@dataclass(frozen=True)
class QExpansion:
    """a_0 + a_1 q + ... + a_(N-1) q^(N-1) + O(q^N)."""
    weight: int
    coeffs: Tuple[Rational, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', tuple(_normalize(c) for c in self.coeffs))

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int):
        if n >= self.precision:
            raise InsufficientPrecisionError(f"coefficient {n} needs precision > {n}, have {self.precision}")
        return self.coeffs[n]

    def truncate(self, N: int) -> 'QExpansion':
        if N > self.precision:
            raise InsufficientPrecisionError(f"cannot extend precision {self.precision} to {N}")
        return QExpansion(self.weight, self.coeffs[:N])

    def __add__(self, other: 'QExpansion') -> 'QExpansion':
        if self.weight != other.weight:
            raise PreconditionError(f"cannot add weights {self.weight} and {other.weight}")
        N = min(self.precision, other.precision)
        return QExpansion(self.weight, tuple(a + b for a, b in zip(self.coeffs[:N], other.coeffs[:N])))

    def __neg__(self) -> 'QExpansion':
        return QExpansion(self.weight, tuple(-a for a in self.coeffs))

    def __sub__(self, other: 'QExpansion') -> 'QExpansion':
        return self + (-other)

    def scale(self, c) -> 'QExpansion':
        return QExpansion(self.weight, tuple(c * a for a in self.coeffs))

    def __mul__(self, other: 'QExpansion') -> 'QExpansion':
        N = min(self.precision, other.precision)
        out = [0] * N
        for i, a in enumerate(self.coeffs[:N]):
            if a:
                for j in range(N - i):
                    b = other.coeffs[j]
                    if b:
                        out[i + j] += a * b
        return QExpansion(self.weight + other.weight, tuple(out))

    def __pow__(self, e: int) -> 'QExpansion':
        result = QExpansion(0, (1,) + (0,) * (self.precision - 1))
        for _ in range(e):
            result = result * self
        return result

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def to_dict(self) -> Dict:
        return {'weight': self.weight, 'precision': self.precision, 'coeffs': [str(c) for c in self.coeffs]}


@functools.lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """B_k with B_1 = -1/2, from sum_(j<=m) binom(m+1, j) B_j = 0."""
    if k < 0:
        raise PreconditionError(f"Bernoulli index must be >= 0, got {k}")
    if k == 0:
        return Fraction(1)
    if k == 1:
        return Fraction(-1, 2)
    if k % 2:
        return Fraction(0)
    total = sum(comb(k + 1, j) * bernoulli(j) for j in range(k))
    return -total / (k + 1)


def sigma(n: int, k: int) -> int:
    return int(divisor_sigma(n, k))


@functools.lru_cache(maxsize=64)
def eisenstein(k: int, N: int) -> QExpansion:
    """E_k = 1 - (2k / B_k) sum sigma_(k-1)(n) q^n."""
    if k < 4 or k % 2:
        raise PreconditionError(f"Eisenstein series need even weight >= 4, got {k}")
    factor = Fraction(-2 * k) / bernoulli(k)
    return QExpansion(k, (1,) + tuple(factor * sigma(n, k - 1) for n in range(1, N)))


@functools.lru_cache(maxsize=16)
def delta(N: int) -> QExpansion:
    """(E_4^3 - E_6^2) / 1728."""
    if N < 2:
        raise PreconditionError(f"Delta needs precision >= 2, got {N}")
    E4, E6 = eisenstein(4, N), eisenstein(6, N)
    difference = E4 * E4 * E4 - E6 * E6
    return difference.scale(Fraction(1, 1728))


def eta_delta(N: int) -> QExpansion:
    """q prod (1 - q^n)^24 expanded to precision N."""
    series = [0] * N
    if N > 1:
        series[1] = 1
    for n in range(1, N):
        for _ in range(24):
            # multiply by (1 - q^n)
            for i in range(N - 1, n - 1, -1):
                series[i] -= series[i - n]
    return QExpansion(12, tuple(series))


def cusp_dimension(k: int) -> int:
    if k < 0 or k % 2:
        return 0
    d = k // 12 - 1 if k % 12 == 2 else k // 12
    return max(d, 0)


def _eisenstein_monomial(weight: int, N: int) -> QExpansion:
    """E_4^a E_6^b of the given weight (b in {0, 1})."""
    b = 0 if weight % 4 == 0 else 1
    a = (weight - 6 * b) // 4
    result = QExpansion(0, (1,) + (0,) * (N - 1))
    for _ in range(a):
        result = result * eisenstein(4, N)
    if b:
        result = result * eisenstein(6, N)
    return result


@functools.lru_cache(maxsize=32)
def miller_basis(k: int, N: int) -> List[QExpansion]:
    """Basis f_1..f_dim of S_k with a_j(f_i) = [i == j] for 1 <= j <= dim."""
    if k < 12 or k % 2:
        raise PreconditionError(f"cusp forms need even weight >= 12, got {k}")
    dim = cusp_dimension(k)
    if N < dim + 1:
        raise InsufficientPrecisionError(f"weight {k} needs precision >= {dim + 1}, got {N}")
    D = delta(N)
    generators = []
    power = D
    for i in range(1, dim + 1):
        generators.append(power * _eisenstein_monomial(k - 12 * i, N))
        power = power * D
    basis: Dict[int, QExpansion] = {}
    for i in range(dim, 0, -1):
        f = generators[i - 1]
        for j in range(i + 1, dim + 1):
            if f[j]:
                f = f - basis[j].scale(f[j])
        basis[i] = f
    logger.debug(f"Miller basis of weight {k} to precision {N}: dimension {dim}")
    return [basis[i] for i in range(1, dim + 1)]


def hecke_operator(f: QExpansion, p: int) -> QExpansion:
    """a_n(T_p f) = a_(np) + p^(k-1) a_(n/p)."""
    if not isprime(p):
        raise PreconditionError(f"T_p needs a prime, got {p}")
    N = (f.precision - 1) // p + 1
    k = f.weight
    coeffs = []
    for n in range(N):
        c = f[n * p]
        if n % p == 0:
            c += p ** (k - 1) * f[n // p]
        coeffs.append(c)
    return QExpansion(k, tuple(coeffs))


def hecke_matrix(k: int, p: int, N: int) -> Matrix:
    """Matrix of T_p on S_k in the Miller basis; column j holds the image of f_j."""
    dim = cusp_dimension(k)
    if N < p * dim + 1:
        raise InsufficientPrecisionError(f"T_{p} on weight {k} needs precision >= {p * dim + 1}, got {N}")
    basis = miller_basis(k, N)
    images = [hecke_operator(f, p) for f in basis]
    return Matrix(dim, dim, lambda i, j: images[j][i + 1])


def char_poly(matrix: Matrix) -> Poly:
    return Poly(matrix.charpoly(x).as_expr(), x)


def eigenvalue_field_check() -> bool:
    """char poly of T_2 on S_24 is the norm of x - (552 - 24 alpha) with alpha^2 - alpha - 36042 = 0."""
    target = Poly(resultant(alpha ** 2 - alpha - 36042, x + 24 * alpha - 552, alpha), x)
    actual = char_poly(hecke_matrix(24, 2, 2 * cusp_dimension(24) + 1))
    return (target - target.LC() * actual).is_zero


def predict_congruences(n: int) -> List[CongruencePrediction]:
    """One prediction per good ell and boundary generator eps_(k-1) with ell | k."""
    predictions = []
    for ell in good_primes(n).primes:
        for k in range(ell, n + 1, ell):
            e = int(p_valuation(k, ell))
            predictions.append(CongruencePrediction(n=n, ell=ell, e=e, a=n - k + 1, b=k, k=k))
    return predictions


def collapse_predictions(predictions: List[CongruencePrediction]) -> List[CongruencePrediction]:
    """Drop predictions whose exponent pair agrees with an earlier one mod phi(ell^e)."""
    seen = set()
    kept = []
    for pred in predictions:
        phi = int(totient(pred.modulus))
        key = (pred.ell, pred.e, tuple(sorted((pred.a % phi, pred.b % phi))))
        if key not in seen:
            seen.add(key)
            kept.append(pred)
    return kept


def verify_congruence(pred: CongruencePrediction, p_max: int) -> CheckReport:
    """a_p = p^a + p^b mod ell^e (dimension one) or det(T_p - (p^a + p^b)) = 0 mod ell^e."""
    k = pred.weight
    dim = cusp_dimension(k)
    m = pred.modulus
    report = CheckReport(name=f"congruence n={pred.n} ell^e={m} ({pred.a},{pred.b})")
    if dim == 0:
        report.fail(f"no cusp forms of weight {k}")
        return report
    primes = [p for p in primerange(2, p_max + 1) if p != pred.ell]
    basis = miller_basis(k, (p_max * dim + 1) if dim > 1 else p_max + 1)
    for p in primes:
        rhs = pred.rhs(p)
        if dim == 1:
            lhs = basis[0][p] % m
            ok = lhs == rhs
        else:
            images = [hecke_operator(f, p) for f in basis]
            T_p = Matrix(dim, dim, lambda i, j: images[j][i + 1])
            lhs = int((T_p - rhs * Matrix.eye(dim)).det()) % m
            ok = lhs == 0
        if not ok:
            report.fail(f"p={p}: {lhs} against {rhs} mod {m}")
        report.rows.append({'n': pred.n, 'ell': pred.ell, 'e': pred.e, 'a': pred.a, 'b': pred.b,
                            'p': p, 'lhs': lhs, 'rhs': rhs, 'ok': ok})
    logger.info(f"Congruence mod {m} with exponents ({pred.a},{pred.b}) in weight {k}: "
                f"{'ok' if report.ok else 'FAILED'} over {len(primes)} primes")
    return report


def serre_congruence() -> CongruencePrediction:
    """tau(p) = p + p^10 mod 25: the k = 10 boundary prediction in degree 10, taken mod 25."""
    return CongruencePrediction(n=10, ell=5, e=2, a=1, b=10, k=10)


def congruence_suite(n: int, ells: List[int], p_max: int, det_pmax: Optional[int] = None) -> CheckReport:
    """Collapsed predictions for the given ells; det_pmax bounds p when S_(n+2) has dimension > 1."""
    report = CheckReport(name=f"congruences n={n}")
    predictions = [pred for pred in collapse_predictions(predict_congruences(n)) if pred.ell in ells]
    if n == 10:
        predictions.append(serre_congruence())
    bound = p_max if cusp_dimension(n + 2) <= 1 else (det_pmax or p_max)
    for pred in predictions:
        report.merge(verify_congruence(pred, bound))
    report.details = {'predictions': [pred.to_dict() for pred in predictions]}
    return report
