"""Small dense linear algebra over exact rationals.

Matrices are tuples of tuples of Fraction; vectors are tuples of Fraction.
Sizes here are tiny (quivers have at most a few dozen vertices), so the
naive algorithms are fine.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def vec(xs: Iterable) -> Vec:
    return tuple(frac(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Mat:
    return tuple(vec(r) for r in rows)


def zeros(n: int, m: int) -> Mat:
    return tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n))


def identity(n: int) -> Mat:
    return tuple(tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n))


def unit(n: int, i: int) -> Vec:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def add(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def sub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def neg(u: Vec) -> Vec:
    return tuple(-a for a in u)


def scale(c, u: Vec) -> Vec:
    c = frac(c)
    return tuple(c * a for a in u)


def dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v, strict=True)), Fraction(0))


def matvec(m: Mat, v: Vec) -> Vec:
    return tuple(dot(row, v) for row in m)


def vecmat(v: Vec, m: Mat) -> Vec:
    n = len(m[0])
    return tuple(sum((v[i] * m[i][j] for i in range(len(m))), Fraction(0)) for j in range(n))


def matmul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def transpose(m: Mat) -> Mat:
    return tuple(tuple(m[i][j] for i in range(len(m))) for j in range(len(m[0])))


def bilinear(m: Mat, u: Vec, v: Vec) -> Fraction:
    """u^T m v."""
    return dot(u, matvec(m, v))


def is_skew(m: Mat) -> bool:
    n = len(m)
    return all(m[i][j] == -m[j][i] for i in range(n) for j in range(n))


def rank(m: Mat) -> int:
    rows = [list(r) for r in m]
    n = len(rows)
    if n == 0:
        return 0
    cols = len(rows[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c] / pr[c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        r += 1
        if r == n:
            break
    return r


def inverse(m: Mat) -> Mat:
    """Gauss-Jordan inverse; raises ValueError on singular input."""
    n = len(m)
    aug = [list(m[i]) + [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [a / pv for a in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


def solve(m: Mat, rhs: Vec) -> Vec:
    return matvec(inverse(m), rhs)


def solve_in_span(vectors: Sequence[Vec], v: Vec) -> Vec:
    """Coefficients c with v = sum c_i vectors[i]; ValueError if not in the span."""
    k = len(vectors)
    dim = len(v)
    aug = [[vectors[i][r] for i in range(k)] + [v[r]] for r in range(dim)]
    row = 0
    pivots = []
    for c in range(k):
        piv = next((i for i in range(row, dim) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][c]
        aug[row] = [a / pv for a in aug[row]]
        for i in range(dim):
            if i != row and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[row])]
        pivots.append(c)
        row += 1
    coeffs = [Fraction(0)] * k
    for r, c in enumerate(pivots):
        coeffs[c] = aug[r][k]
    for i in range(row, dim):
        if aug[i][k] != 0:
            raise ValueError("vector is not in the span")
    # verify (guards against free columns)
    for r in range(dim):
        total = sum((coeffs[i] * vectors[i][r] for i in range(k)), Fraction(0))
        if total != v[r]:
            raise ValueError("vector is not in the span")
    return tuple(coeffs)


def det(m: Mat) -> Fraction:
    rows = [list(r) for r in m]
    n = len(rows)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            d = -d
        d *= rows[c][c]
        inv = 1 / rows[c][c]
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return d


def fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)


def mat_str_rows(m: Mat) -> list[list[str]]:
    return [[fraction_str(x) for x in row] for row in m]


def mat_from_str_rows(rows: Sequence[Sequence[str]]) -> Mat:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)
