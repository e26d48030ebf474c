"""
Exact integer matrix algebra: Smith normal form, kernels, cokernels.

Every cohomology group in the toolkit is a cokernel or kernel computed here.
Pivoting picks the nonzero entry of minimal absolute value (first in row-major
order on ties) so results are reproducible and coefficient growth stays small.
"""
import logging
from dataclasses import dataclass
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import factorint

from .errors import PreconditionError
from .models import AbelianGroupStructure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntMatrix:
    """Dense row-major matrix of Python integers."""
    rows: int
    cols: int
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(f"entry count does not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> 'IntMatrix':
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> 'IntMatrix':
        data = tuple(tuple(int(col[i]) for col in columns) for i in range(rows))
        return cls(rows, len(columns), data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'IntMatrix':
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> 'IntMatrix':
        return cls(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> 'IntMatrix':
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            data[i][i] = v
        return cls.from_rows(data, cols)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def row(self, i: int) -> List[int]:
        return list(self.entries[i])

    def column(self, j: int) -> List[int]:
        return [r[j] for r in self.entries]

    def columns(self) -> List[List[int]]:
        return [self.column(j) for j in range(self.cols)]

    def to_lists(self) -> List[List[int]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> 'IntMatrix':
        return IntMatrix.from_columns(self.entries, self.cols) if self.rows else IntMatrix.zeros(self.cols, 0)

    def apply(self, vector: Sequence[int]) -> List[int]:
        if len(vector) != self.cols:
            raise ValueError(f"vector of length {len(vector)} does not fit {self.rows}x{self.cols}")
        return [sum(a * b for a, b in zip(r, vector)) for r in self.entries]

    def __matmul__(self, other: 'IntMatrix') -> 'IntMatrix':
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        other_cols = other.columns()
        data = [[sum(a * b for a, b in zip(r, c)) for c in other_cols] for r in self.entries]
        return IntMatrix.from_rows(data, other.cols)

    def __add__(self, other: 'IntMatrix') -> 'IntMatrix':
        self._check_shape(other)
        return IntMatrix.from_rows([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols)

    def __sub__(self, other: 'IntMatrix') -> 'IntMatrix':
        self._check_shape(other)
        return IntMatrix.from_rows([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols)

    def scale(self, c: int) -> 'IntMatrix':
        return IntMatrix.from_rows([[c * a for a in r] for r in self.entries], self.cols)

    def mod(self, m: int) -> 'IntMatrix':
        return IntMatrix.from_rows([[a % m for a in r] for r in self.entries], self.cols)

    def hstack(self, *others: 'IntMatrix') -> 'IntMatrix':
        data = [list(r) for r in self.entries]
        cols = self.cols
        for other in others:
            if other.rows != self.rows:
                raise ValueError(f"cannot stack {other.rows} rows next to {self.rows}")
            for target, r in zip(data, other.entries):
                target.extend(r)
            cols += other.cols
        return IntMatrix.from_rows(data, cols)

    def vstack(self, *others: 'IntMatrix') -> 'IntMatrix':
        data = list(self.entries)
        for other in others:
            if other.cols != self.cols:
                raise ValueError(f"cannot stack {other.cols} columns under {self.cols}")
            data.extend(other.entries)
        return IntMatrix.from_rows(data, self.cols)

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.entries) for j, x in enumerate(r) if i != j)

    def determinant(self) -> int:
        """Bareiss fraction-free elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        a = self.to_lists()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k]), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1

    def _check_shape(self, other: 'IntMatrix'):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")


@dataclass(frozen=True)
class SmithDecomposition:
    """U * A * V = D with U, V unimodular and D diagonal in divisibility order."""
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> List[int]:
        return [self.D[i, i] for i in range(min(self.D.rows, self.D.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def _identity_lists(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _nearest_quotient(x: int, pivot: int) -> int:
    q, r = divmod(x, pivot)
    if 2 * abs(r) > abs(pivot):
        q += 1
    return q


def _symmetric(x: int, m: int) -> int:
    x %= m
    return x - m if 2 * x > m else x


def _min_entry(a: List[List[int]], rows: Iterable[int], cols: Sequence[int]) -> Optional[Tuple[int, int]]:
    best, where = None, None
    for i in rows:
        row = a[i]
        for j in cols:
            x = row[j]
            if x and (best is None or abs(x) < best):
                best, where = abs(x), (i, j)
                if best == 1:
                    return where
    return where


class _Reducer:
    """Mutable working state of one Smith reduction."""

    def __init__(self, a: List[List[int]], rows: int, cols: int, track_u: bool, track_v: bool,
                 modulus: Optional[int]):
        self.a, self.rows, self.cols, self.modulus = a, rows, cols, modulus
        self.u = _identity_lists(rows) if track_u else None
        self.v = _identity_lists(cols) if track_v else None

    def _norm(self, x: int) -> int:
        return _symmetric(x, self.modulus) if self.modulus else x

    def swap_rows(self, i: int, j: int):
        if i != j:
            self.a[i], self.a[j] = self.a[j], self.a[i]
            if self.u is not None:
                self.u[i], self.u[j] = self.u[j], self.u[i]

    def swap_cols(self, i: int, j: int):
        if i != j:
            for row in self.a:
                row[i], row[j] = row[j], row[i]
            if self.v is not None:
                for row in self.v:
                    row[i], row[j] = row[j], row[i]

    def add_row(self, target: int, source: int, q: int):
        """row[target] += q * row[source]"""
        src = self.a[source]
        self.a[target] = [self._norm(x + q * y) for x, y in zip(self.a[target], src)]
        if self.u is not None:
            usrc = self.u[source]
            self.u[target] = [self._norm(x + q * y) for x, y in zip(self.u[target], usrc)]

    def add_col(self, target: int, source: int, q: int):
        """col[target] += q * col[source]"""
        for row in self.a:
            if row[source]:
                row[target] = self._norm(row[target] + q * row[source])
        if self.v is not None:
            for row in self.v:
                if row[source]:
                    row[target] = self._norm(row[target] + q * row[source])

    def clear_cross(self, t: int) -> bool:
        """Euclid step on column t and row t; True if a remainder is left."""
        pivot = self.a[t][t]
        leftover = False
        for r in range(t + 1, self.rows):
            x = self.a[r][t]
            if x:
                q = _nearest_quotient(x, pivot)
                if q:
                    self.add_row(r, t, -q)
                leftover = leftover or self.a[r][t] != 0
        if leftover:
            return True
        for c in range(t + 1, self.cols):
            x = self.a[t][c]
            if x:
                q = _nearest_quotient(x, pivot)
                if q:
                    self.add_col(c, t, -q)
                leftover = leftover or self.a[t][c] != 0
        return leftover

    def non_divisible_row(self, t: int) -> Optional[int]:
        pivot = self.a[t][t]
        for r in range(t + 1, self.rows):
            row = self.a[r]
            for c in range(t + 1, self.cols):
                if row[c] % pivot:
                    return r
        return None

    def run(self, chain: bool):
        limit = min(self.rows, self.cols)
        col_range = list(range(self.cols))
        for t in range(limit):
            where = _min_entry(self.a, range(t, self.rows), col_range[t:])
            if where is None:
                break
            self.swap_rows(t, where[0])
            self.swap_cols(t, where[1])
            while True:
                if self.clear_cross(t):
                    cross = [(r, t) for r in range(t, self.rows) if self.a[r][t]]
                    cross += [(t, c) for c in range(t + 1, self.cols) if self.a[t][c]]
                    i, j = min(cross, key=lambda rc: abs(self.a[rc[0]][rc[1]]))
                    self.swap_rows(t, i)
                    self.swap_cols(t, j)
                    continue
                if not chain:
                    break
                bad = self.non_divisible_row(t)
                if bad is None:
                    break
                self.add_row(t, bad, 1)
            if self.a[t][t] < 0 and not self.modulus:
                self.a[t] = [-x for x in self.a[t]]
                if self.u is not None:
                    self.u[t] = [-x for x in self.u[t]]


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Full Smith normal form with unimodular transforms U, V such that U*A*V = D."""
    logger.debug(f"SNF with transforms on {A.rows}x{A.cols}")
    reducer = _Reducer(A.to_lists(), A.rows, A.cols, True, True, None)
    reducer.run(chain=True)
    return SmithDecomposition(
        U=IntMatrix.from_rows(reducer.u, A.rows),
        D=IntMatrix.from_rows(reducer.a, A.cols),
        V=IntMatrix.from_rows(reducer.v, A.cols),
    )


def elementary_divisors(A: IntMatrix) -> List[int]:
    """Nonzero diagonal entries of the Smith form (no transforms kept)."""
    logger.debug(f"SNF diagonal on {A.rows}x{A.cols}")
    reducer = _Reducer(A.to_lists(), A.rows, A.cols, False, False, None)
    reducer.run(chain=False)
    diagonal = [abs(reducer.a[i][i]) for i in range(min(A.rows, A.cols))]
    return [d for d in diagonal if d]


def cokernel_structure(A: IntMatrix) -> AbelianGroupStructure:
    """Structure of Z^rows / column-span(A)."""
    return AbelianGroupStructure.from_divisors(elementary_divisors(A), A.rows)


def _prime_power(m: int) -> Optional[Tuple[int, int]]:
    factors = factorint(m)
    if len(factors) == 1:
        (p, e), = factors.items()
        return p, e
    return None


def _valuation_below(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _prime_power_pivots(rows: List[List[int]], p: int, e: int) -> List[int]:
    """
    Valuations of the Smith pivots of a matrix over Z/p^e.
    Pivot = entry of minimal valuation (first row-major); the pivot row is dropped
    after clearing its column, since the rest of that row is divisible by the pivot.
    """
    m = p ** e
    work = [[x % m for x in row] for row in rows]
    valuations = []
    while work:
        best = None
        for r, row in enumerate(work):
            for c, x in enumerate(row):
                if x and x % p:
                    best = (0, r, c)
                    break
                if x:
                    v = _valuation_below(x, p)
                    if best is None or v < best[0]:
                        best = (v, r, c)
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, r, c = best
        pivot_row = work.pop(r)
        pv = p ** v
        inverse = pow(pivot_row[c] // pv, -1, m)
        for i, row in enumerate(work):
            x = row[c]
            if x:
                q = (x // pv) * inverse % m
                work[i] = [(y - q * z) % m for y, z in zip(row, pivot_row)]
        valuations.append(v)
    return valuations


def cokernel_mod(A: IntMatrix, m: int) -> AbelianGroupStructure:
    """Structure of (Z/m)^rows / image(A), i.e. the cokernel of [A | m*I]."""
    if m < 2:
        raise PreconditionError(f"modulus must be >= 2, got {m}")
    n = A.rows
    local = _prime_power(m)
    if local is not None:
        p, e = local
        valuations = _prime_power_pivots(A.to_lists(), p, e)
        divisors = [p ** v for v in valuations] + [m] * (n - len(valuations))
    else:
        full = A.hstack(IntMatrix.identity(n).scale(m))
        diagonal = elementary_divisors(full)
        divisors = [gcd(d, m) for d in diagonal] + [m] * (n - len(diagonal))
    return AbelianGroupStructure.from_divisors(divisors, n, modulus=m)


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Columns form a saturated Z-basis of {x : A x = 0}."""
    reducer = _Reducer(A.to_lists(), A.rows, A.cols, False, True, None)
    reducer.run(chain=False)
    rank = sum(1 for i in range(min(A.rows, A.cols)) if reducer.a[i][i])
    V = reducer.v
    basis = [[V[i][j] for i in range(A.cols)] for j in range(rank, A.cols)]
    return IntMatrix.from_columns(basis, A.cols)


def kernel_mod(A: IntMatrix, m: int) -> Tuple[AbelianGroupStructure, List[List[int]], List[bool]]:
    """
    Kernel of A over Z/m.
    Returns its structure, generators (one per cyclic summand, reduced mod m) and
    flags marking the generators of free Z/m summands.
    """
    if m < 2:
        raise PreconditionError(f"modulus must be >= 2, got {m}")
    reducer = _Reducer(A.mod(m).to_lists(), A.rows, A.cols, False, True, m)
    reducer.run(chain=False)
    V = reducer.v
    orders, generators, primitive = [], [], []
    for j in range(A.cols):
        d = reducer.a[j][j] if j < A.rows else 0
        g = gcd(d, m)  # gcd(0, m) = m
        if g == 1:
            continue
        scale = m // g
        generators.append([(scale * V[i][j]) % m for i in range(A.cols)])
        orders.append(g)
        primitive.append(g == m)
    structure = AbelianGroupStructure.from_divisors(orders, len(orders), modulus=m)
    return structure, generators, primitive


def class_order(A: IntMatrix, vector: Sequence[int]) -> Optional[int]:
    """Additive order of the class of vector in Z^rows / colspan(A); None if infinite."""
    base = cokernel_structure(A)
    augmented = cokernel_structure(A.hstack(IntMatrix.from_columns([vector], A.rows)))
    if augmented.free_rank < base.free_rank:
        return None
    return base.torsion_order() // augmented.torsion_order()


def class_order_mod(A: IntMatrix, vector: Sequence[int], m: int) -> int:
    """Additive order of the class of vector in (Z/m)^rows / image(A)."""
    base = cokernel_mod(A, m)
    augmented = cokernel_mod(A.hstack(IntMatrix.from_columns([vector], A.rows)), m)
    return base.order() // augmented.order()


def solve_mod_prime(columns: Sequence[Sequence[int]], target: Sequence[int], p: int) -> Optional[List[int]]:
    """Find c with sum c_j * columns[j] = target over F_p, or None."""
    n = len(target)
    k = len(columns)
    rows = [[columns[j][i] % p for j in range(k)] + [target[i] % p] for i in range(n)]
    pivots = []
    r = 0
    for c in range(k):
        pivot = next((i for i in range(r, n) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inverse = pow(rows[r][c], -1, p)
        rows[r] = [x * inverse % p for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c]:
                q = rows[i][c]
                rows[i] = [(x - q * y) % p for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[i][k] for i in range(r, n)):
        return None
    solution = [0] * k
    for i, c in enumerate(pivots):
        solution[c] = rows[i][k]
    return solution
