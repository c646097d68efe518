"""Constructive solver for homogeneous diagonal quadratic + linear systems.

Given a d x n matrix ``U`` over Z_p (column i is a vector u_i in Z_p^d) we look
for a nonzero j in Z_p^n with

    sum_i u_i * j_i^2 = 0   and   sum_i u_i * j_i = 0.

Chevalley-Warning guarantees a nonzero solution once n > 3d; with
n >= (d+1)^2 (d+2) / 2 variables one can be *constructed* in time polynomial
in d and log p.  The construction first solves the quadratic-only system on
d+1 disjoint blocks of (d+1)(d+2)/2 columns and then mixes the block
solutions linearly to kill the linear equations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from . import fp
from .fplinalg import kernel_basis, mat_vec, rref

__all__ = [
    "PreconditionError",
    "SystemFormatError",
    "QuadLinSystem",
    "block_size",
    "full_size",
    "solve_quadratic_block",
    "block_solutions",
    "solve_full_system",
    "check_solution",
    "parse_system",
    "format_system",
]


class PreconditionError(ValueError):
    """Input violates a size or field precondition of the solver."""


class SystemFormatError(ValueError):
    """A system file could not be parsed."""


def block_size(d: int) -> int:
    """Columns needed by the quadratic-only solver for d equations."""
    return (d + 1) * (d + 2) // 2


def full_size(d: int) -> int:
    """Columns needed by the full quadratic + linear solver."""
    return (d + 1) * block_size(d)


@dataclass(frozen=True)
class QuadLinSystem:
    p: int
    d: int
    n: int
    U: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        fp.check_prime(self.p)
        if self.d < 0 or self.n < 1:
            raise PreconditionError("need d >= 0 and n >= 1")
        if len(self.U) != self.d or any(len(r) != self.n for r in self.U):
            raise PreconditionError(f"U must be {self.d} x {self.n}")
        object.__setattr__(self, "U", tuple(tuple(x % self.p for x in r) for r in self.U))

    @classmethod
    def from_columns(cls, p: int, cols: Sequence[Sequence[int]], d: int) -> "QuadLinSystem":
        U = tuple(tuple(c[l] for c in cols) for l in range(d))
        return cls(p, d, len(cols), U)


def check_solution(U: Sequence[Sequence[int]], j: Sequence[int], p: int,
                   linear: bool = True) -> bool:
    """Nonzero and satisfies the quadratic (and optionally linear) equations."""
    if not any(x % p for x in j):
        return False
    sq = [x * x for x in j]
    if any(mat_vec(U, sq, p)):
        return False
    return not (linear and any(mat_vec(U, j, p)))


class _Ctx:
    """Per-solve constants: the non-residue lambda and, for p = 1 mod 4, sqrt(-1)."""

    def __init__(self, p: int, rng: random.Random):
        self.p = p
        self.rng = rng
        if p % 4 == 3:
            self.lam = p - 1
            self.sqrt_minus_one = None
        else:
            self.lam = fp.find_nonresidue(p, rng)
            self.sqrt_minus_one = fp.sqrt_mod(p - 1, p, nonresidue=self.lam)
        self.lam_inv = pow(self.lam, -1, p)

    def sqrt(self, a: int) -> int:
        return fp.sqrt_mod(a, self.p, nonresidue=self.lam)


def _unit(n: int, k: int) -> list[int]:
    v = [0] * n
    v[k] = 1
    return v


def _solve_rec(rows: list[list[int]], ncols: int, ctx: _Ctx) -> list[int]:
    p = ctx.p
    d = len(rows)
    if d == 0:
        return _unit(ncols, 0)
    if d == 1:
        a, b, c = rows[0][:3]
        x, y, z = fp.solve_ternary_diagonal(a, b, c, p, ctx.rng, ctx.lam)
        return [x, y, z] + [0] * (ncols - 3)

    R, r, pivots = rref(rows, p)
    if r < d:
        # dependent equations carry no information
        return _solve_rec(R[:r], ncols, ctx)

    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    q, tail = free[0], free[1:]
    col = [R[i][q] for i in range(d)]
    if not any(col):
        return _unit(ncols, q)

    # Row i reads  y_{piv_i}^2 + col_i * y_q^2 + sum_t R[i][t] y_t^2 = 0.
    # Split rows by the class of col_i: square, lambda * square, zero.
    sq_rows, lam_rows, zero_rows = [], [], []
    v: dict[int, int] = {}
    for i, c in enumerate(col):
        if c == 0:
            zero_rows.append(i)
        elif fp.is_qr(c, p):
            sq_rows.append(i)
            v[i] = ctx.sqrt(c)
        else:
            lam_rows.append(i)
            v[i] = ctx.sqrt(c * ctx.lam_inv % p)

    # after dividing row i by v_i^2 and substituting y_{piv_i} = v_i * y'_i
    scaled = {}
    for i, vi in v.items():
        w = pow(vi * vi, -1, p)
        scaled[i] = [R[i][t] * w % p for t in tail]

    tail_lines = [[R[i][t] for t in tail] for i in zero_rows]
    for group in (sq_rows, lam_rows):
        if group:
            lead = scaled[group[0]]
            for i in group[1:]:
                tail_lines.append([(a - b) % p for a, b in zip(scaled[i], lead)])

    # Pick the surviving binary line  y'^2 + alpha * y_q^2 + <coeffs, y_T^2> = 0
    # and, if two lines survive, pin one variable to y_q to kill the other.
    pin = None  # (row, multiplier): y'_row = multiplier * y_q
    if sq_rows and lam_rows:
        s0, l0 = sq_rows[0], lam_rows[0]
        if p % 4 == 1:
            pin = (s0, ctx.sqrt_minus_one)
            tail_lines.append(scaled[s0])
            bin_row, alpha = l0, ctx.lam
        else:
            pin = (l0, 1)
            tail_lines.append(scaled[l0])
            bin_row, alpha = s0, 1
    elif sq_rows:
        bin_row, alpha = sq_rows[0], 1
    else:
        bin_row, alpha = lam_rows[0], ctx.lam
    assert len(tail_lines) == d - 1

    y_tail = _solve_rec(tail_lines, len(tail), ctx)
    b = sum(c * y * y for c, y in zip(scaled[bin_row], y_tail)) % p
    x_bin, y_q = fp.solve_binary_inhomogeneous(alpha, b, p, ctx.rng, ctx.lam)

    lead_val = {bin_row: x_bin}
    if pin is not None:
        lead_val[pin[0]] = pin[1] * y_q % p
    j = [0] * ncols
    j[q] = y_q
    for t, y in zip(tail, y_tail):
        j[t] = y
    for group in (sq_rows, lam_rows):
        if group:
            yp = lead_val[group[0]]
            for i in group:
                j[pivots[i]] = v[i] * yp % p
    return j


def solve_quadratic_block(U: Sequence[Sequence[int]], p: int, rng: random.Random,
                          n: int | None = None) -> list[int]:
    """Nonzero j with ``U (j squared entrywise) = 0`` over Z_p, p odd.

    ``U`` is d x n with n >= (d+1)(d+2)/2.  ``n`` must be given explicitly
    when d = 0.
    """
    fp.check_prime(p)
    if p == 2:
        raise PreconditionError("the quadratic block solver needs an odd prime")
    d = len(U)
    if n is None:
        if d == 0:
            raise PreconditionError("n is required when U has no rows")
        n = len(U[0])
    if any(len(r) != n for r in U):
        raise PreconditionError("ragged coefficient matrix")
    if n < block_size(d):
        raise PreconditionError(f"need n >= {block_size(d)} columns for d = {d}, got {n}")
    rows = [[x % p for x in r] for r in U]
    return _solve_rec(rows, n, _Ctx(p, rng))


def block_solutions(sys: QuadLinSystem, rng: random.Random) -> list[list[int]]:
    """Quadratic-only solutions on each of the d+1 leading column blocks."""
    nb = block_size(sys.d)
    out = []
    for k in range(sys.d + 1):
        sub = [list(row[k * nb:(k + 1) * nb]) for row in sys.U]
        out.append(solve_quadratic_block(sub, sys.p, rng, n=nb))
    return out


def solve_full_system(sys: QuadLinSystem, rng: random.Random) -> list[int]:
    """Nonzero j with ``U j^2 = 0`` and ``U j = 0`` over Z_p."""
    p, d, n = sys.p, sys.d, sys.n
    if n < full_size(d):
        raise PreconditionError(f"need n >= {full_size(d)} columns for d = {d}, got {n}")
    if p == 2:
        # j^2 = j over Z_2, so only the linear equations remain
        return kernel_basis(sys.U, 2, cols=n)[0]

    nb = block_size(d)
    blocks = block_solutions(sys, rng)
    # L[l][k] = sum over block k of u_{l,i} j_i
    L = [[sum(row[k * nb + i] * blocks[k][i] for i in range(nb)) % p
          for k in range(d + 1)] for row in sys.U]
    lam = kernel_basis(L, p, cols=d + 1)[0]
    j = []
    for lk, blk in zip(lam, blocks):
        j.extend(lk * x % p for x in blk)
    j.extend([0] * (n - len(j)))
    return j


def parse_system(text: str) -> QuadLinSystem:
    """Parse ``p d n`` followed by d rows of n integers."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    try:
        if not lines or len(lines[0]) != 3:
            raise SystemFormatError("header must be 'p d n'")
        p, d, n = (int(x) for x in lines[0])
        rows = [tuple(int(x) for x in ln) for ln in lines[1:]]
    except ValueError as exc:
        if isinstance(exc, SystemFormatError):
            raise
        raise SystemFormatError(f"non-integer token: {exc}") from None
    if d < 0 or n < 1 or len(rows) != d or any(len(r) != n for r in rows):
        raise SystemFormatError(f"expected {d} rows of {n} integers")
    try:
        return QuadLinSystem(p, d, n, tuple(rows))
    except ValueError as exc:
        raise SystemFormatError(str(exc)) from None


def format_system(sys: QuadLinSystem) -> str:
    out = [f"{sys.p} {sys.d} {sys.n}"]
    out += [" ".join(map(str, row)) for row in sys.U]
    return "\n".join(out) + "\n"
