"""Small exact linear-algebra helpers over :class:`fractions.Fraction`.

Matrices are plain lists of rows.  Everything here is exact; callers that
want floats should go through numpy instead.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Matrix = list[list[Fraction]]


def to_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        # only exactly representable values make it through unchanged
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def fraction_str(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    return [[to_fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), 0) for col in bt] for row in a]


def submatrix(a: Sequence[Sequence], rows: Sequence[int], cols: Sequence[int]) -> list[list]:
    return [[a[i][j] for j in cols] for i in rows]


def det(a: Sequence[Sequence]) -> Fraction:
    """Determinant by Bareiss fraction-free elimination.

    Works on integer or rational entries; every division is exact.
    """
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = [[to_fraction(x) for x in row] for row in a]
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * pivot - m[i][k] * m[k][j]) / prev
            m[i][k] = Fraction(0)
        prev = pivot
    return sign * m[n - 1][n - 1]


def solve(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    """Solve ``a x = b`` for square nonsingular ``a``; ``b`` may have many columns."""
    n = len(a)
    aug = [[to_fraction(x) for x in a[i]] + [to_fraction(x) for x in b[i]] for i in range(n)]
    width = len(aug[0])
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        row = [x * inv for x in aug[col]]
        aug[col] = row
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], row)]
    return [r[n:width] for r in aug]


def inverse(a: Sequence[Sequence]) -> Matrix:
    return solve(a, identity(len(a)))
