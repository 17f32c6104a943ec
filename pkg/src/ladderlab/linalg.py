"""Gaussian elimination over GF(q) on small dense matrices (lists of rows)."""

from __future__ import annotations

from typing import Sequence

from .algebra import FieldCtx, FieldElem

Matrix = list[list[FieldElem]]


def rref(F: FieldCtx, rows: Sequence[Sequence[FieldElem]], ncols: int,
         pivot_limit: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form.

    Pivots are taken column by column, choosing the first row (in input
    order) with a nonzero entry.  Only the first ``pivot_limit`` columns are
    eligible as pivots; the rest ride along (augmented columns).
    """
    A = [list(r) for r in rows]
    limit = ncols if pivot_limit is None else pivot_limit
    pivots: list[int] = []
    r = 0
    for col in range(limit):
        if r == len(A):
            break
        piv = next((i for i in range(r, len(A)) if A[i][col]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = F.inv(A[r][col])
        A[r] = [F.mul(inv, x) for x in A[r]]
        for i in range(len(A)):
            c = A[i][col]
            if i != r and c:
                A[i] = [F.sub(x, F.mul(c, y)) for x, y in zip(A[i], A[r])]
        pivots.append(col)
        r += 1
    return A, pivots


def rank(F: FieldCtx, rows: Sequence[Sequence[FieldElem]], ncols: int) -> int:
    return len(rref(F, rows, ncols)[1])


def solve(F: FieldCtx, A: Sequence[Sequence[FieldElem]], b: Sequence[FieldElem],
          ncols: int) -> tuple[list[FieldElem] | None, list[list[FieldElem]]]:
    """Solve ``A x = b``.

    Returns the particular solution with every free variable set to 0 (or
    None when inconsistent) and a basis of the kernel of A.
    """
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    R, pivots = rref(F, aug, ncols + 1, pivot_limit=ncols)
    kernel = _kernel(F, R, pivots, ncols)
    for row in R[len(pivots):]:
        if row[ncols]:
            return None, kernel
    x = [0] * ncols
    for i, col in enumerate(pivots):
        x[col] = R[i][ncols]
    return x, kernel


def _kernel(F: FieldCtx, R: Matrix, pivots: list[int], ncols: int) -> list[list[FieldElem]]:
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [0] * ncols
        v[free] = 1
        for i, col in enumerate(pivots):
            v[col] = F.neg(R[i][free])
        basis.append(v)
    return basis


def kernel(F: FieldCtx, A: Sequence[Sequence[FieldElem]], ncols: int) -> list[list[FieldElem]]:
    R, pivots = rref(F, A, ncols)
    return _kernel(F, R, pivots, ncols)


def mat_vec(F: FieldCtx, A: Sequence[Sequence[FieldElem]], x: Sequence[FieldElem]) -> list[FieldElem]:
    return [F.dot(row, x) for row in A]
