"""Exact linear algebra over the field of rational functions."""

from __future__ import annotations

from typing import Sequence

from ..errors import DimensionError, SingularMatrixError
from .rational import RationalFunction

Matrix = list[list[RationalFunction]]


def jacobian(fs: Sequence[RationalFunction], variables: Sequence[str | int]) -> Matrix:
    """J[i][j] = d fs[i] / d variables[j]."""
    return [[f.derive(v) for v in variables] for f in fs]


def _eliminate(m: Matrix, rhs: list | None = None):
    """Gaussian elimination in place; returns (det, upper, rhs) or det 0."""
    n = len(m)
    a = [list(row) for row in m]
    b = list(rhs) if rhs is not None else None
    det = RationalFunction.constant(1, a[0][0].variables) if n else None
    for col in range(n):
        pivot = None
        best = None
        for r in range(col, n):
            if not a[r][col].is_zero():
                size = len(a[r][col].num) + sum(len(q) for q, _ in a[r][col].factors)
                if best is None or size < best:
                    pivot, best = r, size
        if pivot is None:
            return None, a, b
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            if b is not None:
                b[col], b[pivot] = b[pivot], b[col]
            det = -det
        p = a[col][col]
        det = det * p
        for r in range(col + 1, n):
            if a[r][col].is_zero():
                continue
            f = a[r][col] / p
            a[r][col] = a[r][col] * 0
            for c in range(col + 1, n):
                if not a[col][c].is_zero():
                    a[r][c] = a[r][c] - f * a[col][c]
            if b is not None:
                b[r] = b[r] - f * b[col]
    return det, a, b


def det(m: Matrix) -> RationalFunction:
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionError("determinant of a non-square matrix")
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    d, _, _ = _eliminate(m)
    if d is None:
        return m[0][0] * 0
    return d


def jacobian_det(fs: Sequence[RationalFunction], variables: Sequence[str | int]) -> RationalFunction:
    if len(fs) != len(variables):
        raise DimensionError(f"{len(fs)} functions but {len(variables)} variables")
    return det(jacobian(fs, variables))


def solve_linear(m: Matrix, b: Sequence[RationalFunction]) -> list[RationalFunction]:
    """Solve m x = b exactly.

    Raises SingularMatrixError when det(m) is identically zero. A determinant
    that merely vanishes at some points is not detected here; the solution is
    then a rational function with a pole there.
    """
    n = len(m)
    if any(len(row) != n for row in m) or len(b) != n:
        raise DimensionError("solve_linear needs a square system")
    d, a, rhs = _eliminate(m, list(b))
    if d is None or d.is_zero():
        raise SingularMatrixError("matrix is singular (determinant identically zero)")
    x: list[RationalFunction] = [None] * n  # type: ignore[list-item]
    for r in range(n - 1, -1, -1):
        acc = rhs[r]
        for c in range(r + 1, n):
            if not a[r][c].is_zero():
                acc = acc - a[r][c] * x[c]
        x[r] = acc / a[r][r]
    return x
