"""Dense linear algebra over Z_p.

Matrices are lists of rows, vectors are lists (or tuples) of ints already
reduced mod p.  Elimination always takes the leftmost available pivot so
results depend only on the input.
"""

from __future__ import annotations

from typing import Sequence

Matrix = list[list[int]]
Vector = list[int]


def reduce_matrix(M: Sequence[Sequence[int]], p: int) -> Matrix:
    return [[x % p for x in row] for row in M]


def rref(M: Sequence[Sequence[int]], p: int) -> tuple[Matrix, int, list[int]]:
    """Reduced row-echelon form.

    Returns ``(R, rank, pivot_cols)``; ``R`` has the same shape as ``M`` with
    the zero rows at the bottom.
    """
    R = reduce_matrix(M, p)
    if not R:
        return R, 0, []
    rows, cols = len(R), len(R[0])
    pivots: list[int] = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if R[i][col]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        s = pow(R[r][col], -1, p)
        if s != 1:
            R[r] = [x * s % p for x in R[r]]
        prow = R[r]
        for i in range(rows):
            if i != r and R[i][col]:
                f = R[i][col]
                R[i] = [(x - f * y) % p for x, y in zip(R[i], prow)]
        pivots.append(col)
        r += 1
    return R, r, pivots


def rank(M: Sequence[Sequence[int]], p: int) -> int:
    return rref(M, p)[1]


def mat_vec(M: Sequence[Sequence[int]], v: Sequence[int], p: int) -> Vector:
    return [sum(a * b for a, b in zip(row, v)) % p for row in M]


def dot(u: Sequence[int], v: Sequence[int], p: int) -> int:
    return sum(a * b for a, b in zip(u, v)) % p


def kernel_basis(M: Sequence[Sequence[int]], p: int, cols: int | None = None) -> list[Vector]:
    """Basis of the right null space ``{v : M v = 0}``.

    One vector per free column: the free variable is set to 1, the other free
    variables to 0, and the pivot variables solved for.  ``cols`` must be
    given when ``M`` has no rows.
    """
    if cols is None:
        if not M:
            raise ValueError("cols is required for a matrix with no rows")
        cols = len(M[0])
    if not M:
        return [[int(i == k) for i in range(cols)] for k in range(cols)]
    R, r, pivots = rref(M, p)
    pivset = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivset:
            continue
        v = [0] * cols
        v[free] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][free] % p
        basis.append(v)
    return basis


def orthogonal_complement(V: Sequence[Sequence[int]], k: int, p: int) -> list[Vector]:
    """Basis of ``{w in Z_p^k : <w, v> = 0 for all v in V}``."""
    return kernel_basis([list(v) for v in V], p, cols=k)


def row_space(V: Sequence[Sequence[int]], p: int) -> Matrix:
    """Canonical basis (nonzero rref rows) of the span of ``V``."""
    if not V:
        return []
    R, r, _ = rref(V, p)
    return R[:r]


def in_span(v: Sequence[int], V: Sequence[Sequence[int]], p: int) -> bool:
    if not V:
        return all(x % p == 0 for x in v)
    return rank(list(V) + [list(v)], p) == rank(V, p)


def same_span(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], p: int) -> bool:
    return row_space(A, p) == row_space(B, p)
