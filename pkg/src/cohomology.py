"""
Cohomology of PSL2(Z) with coefficients in M_n.

H^1 is M_n / (M_n^R + M_n^S), H^2_c is M_n / I M_n with I the augmentation ideal,
H^0 mod p^delta is the kernel of the generator relations over Z/p^delta.
Only even n give a module for the group modulo {+-Id}.
"""
import functools
import logging
from dataclasses import dataclass, field
from math import factorial
from typing import Dict, List, Tuple

from sympy import isprime, primerange

from .boundary import boundary_structure
from .errors import PreconditionError
from .exact_linalg import IntMatrix, cokernel_structure, kernel_basis, kernel_mod
from .models import AbelianGroupStructure, CheckReport, CohomologyReport, GoodPrimeSet
from .polyspace import R, S, T, ZZ, CoefficientRing, HomogeneousPoly, act, action_matrix, to_epsilon

logger = logging.getLogger(__name__)


def _check_even(n: int):
    if n < 2 or n % 2:
        raise PreconditionError(f"degree must be even and >= 2, got {n}")


def _check_prime(p: int):
    if not isprime(p) or p <= 3:
        raise PreconditionError(f"expected a prime p > 3, got {p}")


def _minus_identity(g, n: int) -> IntMatrix:
    return action_matrix(g, n) - IntMatrix.identity(n + 1)


@functools.lru_cache(maxsize=128)
def h1_interior(n: int) -> AbelianGroupStructure:
    _check_even(n)
    fixed_r = kernel_basis(_minus_identity(R, n))
    fixed_s = kernel_basis(_minus_identity(S, n))
    structure = cokernel_structure(fixed_r.hstack(fixed_s))
    logger.debug(f"H1 in degree {n}: {structure}")
    return structure


@functools.lru_cache(maxsize=128)
def h2_compact(n: int) -> AbelianGroupStructure:
    _check_even(n)
    structure = cokernel_structure(_minus_identity(R, n).hstack(_minus_identity(S, n)))
    logger.debug(f"H2_c in degree {n}: {structure}")
    return structure


def h0_integral(n: int) -> AbelianGroupStructure:
    _check_even(n)
    stacked = _minus_identity(R, n).vstack(_minus_identity(S, n))
    return AbelianGroupStructure(free_rank=kernel_basis(stacked).cols)


@dataclass
class InvariantSpace:
    """Invariants of degree n over Z/p^delta, one generator per cyclic summand."""
    n: int
    p: int
    delta: int
    structure: AbelianGroupStructure
    basis: List[HomogeneousPoly] = field(default_factory=list)
    primitive: List[bool] = field(default_factory=list)

    def primitive_basis(self) -> List[HomogeneousPoly]:
        return [P for P, flag in zip(self.basis, self.primitive) if flag]

    def to_dict(self) -> Dict:
        return {'n': self.n, 'p': self.p, 'delta': self.delta, 'structure': self.structure.to_dict(),
                'primitive_count': sum(self.primitive)}


def h0_mod(n: int, p: int, delta: int) -> InvariantSpace:
    _check_even(n)
    _check_prime(p)
    if delta < 1:
        raise PreconditionError(f"delta must be >= 1, got {delta}")
    m = p ** delta
    stacked = _minus_identity(S, n).vstack(_minus_identity(T, n))
    structure, generators, primitive = kernel_mod(stacked, m)
    ring = CoefficientRing(m)
    basis = [HomogeneousPoly(n, ring, tuple(v)) for v in generators]
    logger.debug(f"H0 mod {p}^{delta} in degree {n}: {structure}, {sum(primitive)} primitive")
    return InvariantSpace(n=n, p=p, delta=delta, structure=structure, basis=basis, primitive=primitive)


def good_primes(n: int) -> GoodPrimeSet:
    _check_even(n)
    bad = set(h1_interior(n).primes()) | set(h2_compact(n).primes())
    return GoodPrimeSet(n=n, primes=[ell for ell in primerange(5, n) if ell not in bad])


def cohomology_report(n: int) -> CohomologyReport:
    h1 = h1_interior(n)
    h2 = h2_compact(n)
    small = sorted({q for q in h1.primes() + h2.primes() if q <= 3})
    if small:
        logger.debug(f"degree {n} has {small}-torsion, outside the p > 3 range")
    return CohomologyReport(n=n, h1_interior=h1, h1_boundary=boundary_structure(n), h2_compact=h2,
                            h0=h0_integral(n), small_prime_torsion=small)


def fundamental_sequence_check(n: int) -> CheckReport:
    """|H1(boundary)_tor| / |H1_tor| is an integer divisible by |H2_c|."""
    report = CheckReport(name=f"fundamental sequence n={n}")
    boundary_order = factorial(n)
    h1_order = h1_interior(n).torsion_order()
    h2 = h2_compact(n)
    if h2.free_rank:
        report.fail(f"H2_c has free rank {h2.free_rank} in degree {n}")
    elif boundary_order % h1_order:
        report.fail(f"|H1_tor| = {h1_order} does not divide {n}!")
    elif (boundary_order // h1_order) % h2.order():
        report.fail(f"|H2_c| = {h2.order()} does not divide {n}!/{h1_order}")
    report.rows.append({'n': n, 'h1_tor': h1_order, 'h2_c': h2.torsion_order(), 'ok': report.ok})
    return report


def alpha_consistency_check(n: int, p: int) -> CheckReport:
    """dim H0(M_n tensor F_p) equals the number of p-primary cyclic summands of H1_tor."""
    report = CheckReport(name=f"alpha consistency n={n} p={p}")
    invariant_dim = h0_mod(n, p, 1).structure.rank_m
    summands = len(h1_interior(n).p_part(p))
    if invariant_dim != summands:
        report.fail(f"degree {n}: {invariant_dim} invariants mod {p} but {summands} {p}-primary summands")
    report.rows.append({'n': n, 'p': p, 'invariants': invariant_dim, 'summands': summands, 'ok': report.ok})
    return report


def derivation_poly(f: HomogeneousPoly, p: int, level: int) -> HomogeneousPoly:
    """(T f - f) / p^(level-1) reduced mod p."""
    _check_prime(p)
    if level < 2:
        raise PreconditionError(f"level must be >= 2, got {level}")
    if f.ring != ZZ:
        raise PreconditionError("derivation needs an integer lift")
    q = p ** (level - 1)
    difference = act(T, f) - f
    quotient = []
    for v, c in enumerate(difference.coeffs):
        if c % q:
            raise PreconditionError(
                f"coefficient of X^{v}Y^{f.degree - v} in Tf - f is {c}, not divisible by {p}^{level - 1}")
        quotient.append(c // q)
    return HomogeneousPoly(f.degree, CoefficientRing(p), tuple(quotient))


def rn_image(f: HomogeneousPoly, p: int, level: int) -> List[Tuple[int, int]]:
    """Surviving eps coordinates of the derivation mod p as (index, residue), index descending."""
    g = derivation_poly(f, p, level).reduce(0)
    coords = to_epsilon(g).coords
    d = f.degree
    survivors = [d] + [k - 1 for k in range(p, d + 1, p)]
    image = [(j, coords[j] % p) for j in survivors if coords[j] % p]
    return sorted(image, reverse=True)
