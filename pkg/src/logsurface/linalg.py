"""Exact Gaussian elimination over the rationals."""

from __future__ import annotations

from collections.abc import Sequence
from fractions import Fraction


class SingularMatrixError(ArithmeticError):
    pass


def solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``matrix @ x = rhs`` exactly; ``matrix`` must be square and invertible."""
    n = len(matrix)
    if len(rhs) != n or any(len(row) != n for row in matrix):
        raise ValueError("dimension mismatch")
    aug = [[Fraction(v) for v in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrixError(f"no pivot in column {col}")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        prow = [v / p for v in aug[col]]
        aug[col] = prow
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                row = aug[r]
                aug[r] = [a - factor * b for a, b in zip(row, prow)]
    return [aug[i][n] for i in range(n)]


def is_negative_definite(matrix: Sequence[Sequence[Fraction]]) -> bool:
    """Sylvester's criterion: leading minors alternate in sign starting negative."""
    n = len(matrix)
    work = [[Fraction(v) for v in row] for row in matrix]
    # LDL^T style elimination without pivoting; every pivot must be negative
    for col in range(n):
        p = work[col][col]
        if p >= 0:
            return False
        for r in range(col + 1, n):
            if work[r][col] != 0:
                f = work[r][col] / p
                work[r] = [a - f * b for a, b in zip(work[r], work[col])]
    return True
