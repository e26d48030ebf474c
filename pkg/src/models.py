from dataclasses import dataclass, field
from math import prod
from typing import Dict, List, Optional, Tuple

from sympy import factorint


def normalize_divisors(divisors) -> List[int]:
    """
    Turn any list of cyclic orders into an elementary-divisor chain d_1 | d_2 | ...
    Orders equal to 1 are dropped; 0 is not allowed here (free summands are counted separately).
    """
    by_prime: Dict[int, List[int]] = {}
    for d in divisors:
        d = abs(int(d))
        if d <= 1:
            continue
        for q, e in factorint(d).items():
            by_prime.setdefault(q, []).append(q ** e)
    for powers in by_prime.values():
        powers.sort(reverse=True)
    length = max((len(powers) for powers in by_prime.values()), default=0)
    chain = [prod(powers[i] for powers in by_prime.values() if i < len(powers)) for i in range(length)]
    return sorted(chain)


@dataclass(frozen=True)
class AbelianGroupStructure:
    """Finitely generated abelian group Z^r + Z/d_1 + ... + Z/d_s with d_i | d_{i+1}."""
    free_rank: int
    torsion: Tuple[int, ...] = ()
    modulus: Optional[int] = None  # set when the group is a Z/m-module

    def __post_init__(self):
        chain = tuple(normalize_divisors(self.torsion))
        object.__setattr__(self, 'torsion', chain)
        if self.free_rank < 0:
            raise ValueError(f"negative free rank {self.free_rank}")

    @classmethod
    def from_divisors(cls, diagonal, ambient: int, modulus: Optional[int] = None) -> 'AbelianGroupStructure':
        """Structure of Z^ambient modulo a diagonal relation matrix (0 entries mean no relation)."""
        nonzero = [abs(d) for d in diagonal if d != 0]
        return cls(free_rank=ambient - len(nonzero), torsion=tuple(nonzero), modulus=modulus)

    @property
    def rank_m(self) -> Optional[int]:
        """Number of Z/m summands (the Z/p^delta-rank) for a Z/m-module, else None."""
        if self.modulus is None:
            return None
        return sum(1 for d in self.torsion if d == self.modulus)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> Optional[int]:
        """Group order, None when infinite."""
        if self.free_rank:
            return None
        return prod(self.torsion)

    def torsion_order(self) -> int:
        return prod(self.torsion)

    def primary_decomposition(self) -> List[int]:
        """Sorted list of prime-power cyclic factors, e.g. Z/12 -> [3, 4]."""
        parts = []
        for d in self.torsion:
            parts.extend(q ** e for q, e in factorint(d).items())
        return sorted(parts)

    def primes(self) -> List[int]:
        return sorted({q for d in self.torsion for q in factorint(d)})

    def p_part(self, p: int) -> List[int]:
        return [x for x in self.primary_decomposition() if x % p == 0]

    def to_dict(self) -> Dict:
        data = {'free_rank': self.free_rank, 'torsion': list(self.torsion)}
        if self.modulus is not None:
            data['rank_m'] = self.rank_m
        return data

    def __str__(self) -> str:
        parts = ['ℤ'] * self.free_rank + [f"ℤ/{d}" for d in self.torsion]
        return ' ⊕ '.join(parts) if parts else '0'


@dataclass
class CohomologyReport:
    n: int
    h1_interior: AbelianGroupStructure
    h1_boundary: AbelianGroupStructure
    h2_compact: AbelianGroupStructure
    h0: AbelianGroupStructure
    small_prime_torsion: List[int] = field(default_factory=list)  # 2, 3 outside the p > 3 theorems

    def to_dict(self) -> Dict:
        return {
            'n': self.n,
            'h0': self.h0.to_dict(),
            'h1_interior': self.h1_interior.to_dict(),
            'h1_boundary': self.h1_boundary.to_dict(),
            'h2_compact': self.h2_compact.to_dict(),
            'small_prime_torsion': list(self.small_prime_torsion),
        }


@dataclass
class GoodPrimeSet:
    n: int
    primes: List[int]

    def __contains__(self, ell: int) -> bool:
        return ell in self.primes

    def to_dict(self) -> Dict:
        return {'n': self.n, 'primes': list(self.primes)}


@dataclass(frozen=True)
class CongruencePrediction:
    n: int
    ell: int
    e: int
    a: int
    b: int
    k: int  # torsion generator is epsilon_{k-1}

    @property
    def weight(self) -> int:
        return self.n + 2

    @property
    def modulus(self) -> int:
        return self.ell ** self.e

    def rhs(self, p: int) -> int:
        return (pow(p, self.a, self.modulus) + pow(p, self.b, self.modulus)) % self.modulus

    def to_dict(self) -> Dict:
        return {'n': self.n, 'weight': self.weight, 'ell': self.ell, 'e': self.e,
                'a': self.a, 'b': self.b, 'k': self.k}


@dataclass
class HilbertSeries:
    p: int
    delta: int
    coefficients: List[int]
    divisors: List[List[int]] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {'p': self.p, 'delta': self.delta, 'coefficients': list(self.coefficients)}


@dataclass
class CheckReport:
    """Outcome of one verification routine: rows for output, failures for diagnosis."""
    name: str
    ok: bool = True
    rows: List[Dict] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)
    details: Dict = field(default_factory=dict)

    def fail(self, message: str):
        self.ok = False
        self.failures.append(message)

    def merge(self, other: 'CheckReport'):
        self.rows.extend(other.rows)
        if not other.ok:
            self.ok = False
            self.failures.extend(f"{other.name}: {f}" for f in other.failures)

    def to_dict(self) -> Dict:
        return {'name': self.name, 'ok': self.ok, 'rows': self.rows,
                'failures': self.failures, 'details': self.details}


@dataclass
class CacheEntry:
    key: str
    op: str
    value: object
    version: int

    def to_dict(self) -> Dict:
        return {'key': self.key, 'op': self.op, 'value': self.value, 'version': self.version}
