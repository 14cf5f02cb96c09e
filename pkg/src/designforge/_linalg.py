"""Exact Gauss-Jordan elimination over the rationals."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .kernel import PiPoly


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    M = [[Fraction(v) for v in row] for row in rows]
    if not M:
        return M, []
    ncol = len(M[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def kernel_vector(rows: Sequence[Sequence]) -> list[Fraction] | None:
    """A nonzero exact solution of ``A v = 0``, or None if A has full column rank."""
    M, pivots = rref(rows)
    ncol = len(rows[0]) if rows else 0
    free = [c for c in range(ncol) if c not in pivots]
    if not free:
        return None
    f = free[0]
    v = [Fraction(0)] * ncol
    v[f] = Fraction(1)
    for r, c in enumerate(pivots):
        v[c] = -M[r][f]
    return v


def solve_square(A: Sequence[Sequence], b: Sequence) -> list | None:
    """Solve ``A w = b`` exactly for square invertible A.

    ``b`` entries may be rationals or ``PiPoly``; the solve is done
    separately for each power of 1/pi. Returns None when A is singular.
    """
    n = len(A)
    powers = sorted({j for v in b if isinstance(v, PiPoly) for j in v.coeffs} | {0})
    aug = []
    for i in range(n):
        row = [Fraction(v) for v in A[i]]
        bi = b[i]
        for j in powers:
            if isinstance(bi, PiPoly):
                row.append(bi.coeffs.get(j, Fraction(0)))
            else:
                row.append(Fraction(bi) if j == 0 else Fraction(0))
        aug.append(row)
    M, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) > n:
        return None
    any_poly = any(isinstance(v, PiPoly) for v in b)
    out = []
    for i in range(n):
        sol = {j: M[i][n + k] for k, j in enumerate(powers)}
        out.append(PiPoly(sol) if any_poly else sol[0])
    return out
