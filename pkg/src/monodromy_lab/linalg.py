"""Exact linear algebra over the rationals for small dense integer matrices.

Everything here works on plain Python lists of ints (arbitrary precision),
so ranks, kernels and determinants are exact.  Matrices in this project are
at most 75x75, which keeps fraction-free elimination comfortably cheap.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _normalize_int_row(row: list[int]) -> list[int]:
    """Divide by the gcd and make the leading nonzero entry positive."""
    g = 0
    for v in row:
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = [v // g for v in row]
    for v in row:
        if v != 0:
            if v < 0:
                row = [-u for u in row]
            break
    return row


class IntSpan:
    """Row space of integer vectors, kept in integer echelon form.

    Supports incremental insertion (reporting whether the rank grew),
    membership tests, and a canonical RREF form for span equality.
    """

    def __init__(self, n: int, vectors: list[list[int]] | None = None):
        self.n = n
        self.rows: list[list[int]] = []   # echelon rows, sorted by pivot
        self.pivots: list[int] = []
        if vectors:
            for v in vectors:
                self.add(v)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: list[int]) -> list[int]:
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                a, b = row[p], v[p]
                v = [a * x - b * y for x, y in zip(v, row)]
        return v

    def add(self, vec: list[int]) -> bool:
        """Insert a vector; return True iff it was independent of the span."""
        v = self._reduce(vec)
        if not any(v):
            return False
        v = _normalize_int_row(v)
        p = next(i for i, x in enumerate(v) if x != 0)
        at = next((i for i, q in enumerate(self.pivots) if q > p), len(self.pivots))
        self.rows.insert(at, v)
        self.pivots.insert(at, p)
        return True

    def contains(self, vec: list[int]) -> bool:
        return not any(self._reduce(vec))

    def canonical(self) -> tuple[tuple[Fraction, ...], ...]:
        """Fully reduced RREF rows; equal spans give equal canonical forms."""
        rows = [[Fraction(x) for x in r] for r in self.rows]
        for i in range(len(rows) - 1, -1, -1):
            p = self.pivots[i]
            rows[i] = [x / rows[i][p] for x in rows[i]]
            for j in range(i):
                c = rows[j][p]
                if c:
                    rows[j] = [x - c * y for x, y in zip(rows[j], rows[i])]
        return tuple(tuple(r) for r in rows)


def exact_rank(matrix: list[list[int]]) -> int:
    span = IntSpan(len(matrix[0]) if matrix else 0)
    for row in matrix:
        span.add(row)
    return span.rank


def kernel_basis(matrix: list[list[int]]) -> list[list[int]]:
    """Integer basis of the rational null space of an integer matrix."""
    if not matrix:
        return []
    m, n = len(matrix), len(matrix[0])
    a = [[Fraction(x) for x in row] for row in matrix]
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        a[r] = [x / a[r][c] for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for c in free:
        v = [Fraction(0)] * n
        v[c] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -a[i][c]
        lcm = 1
        for x in v:
            lcm = lcm * x.denominator // gcd(lcm, x.denominator)
        basis.append(_normalize_int_row([int(x * lcm) for x in v]))
    return basis


def exact_det(matrix: list[list[int]]) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    a = [list(row) for row in matrix]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[-1][-1] if n else 1


def mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a: list[list[int]], v: list[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]
