"""Arithmetic in the prime field Z_p and quadratic-residue helpers.

Field elements are plain Python ints in ``[0, p)``; the modulus travels
alongside them as an argument.  Randomised routines take an explicit
``random.Random`` so that results are reproducible from a seed.
"""

from __future__ import annotations

import random

__all__ = [
    "FieldError",
    "is_prime",
    "check_prime",
    "inv",
    "is_qr",
    "find_nonresidue",
    "sqrt_mod",
    "solve_ternary_diagonal",
    "solve_binary_inhomogeneous",
]

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FieldError(ValueError):
    """Raised for operations that are undefined in Z_p (e.g. inverting 0)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p: int) -> int:
    """Return ``p`` unchanged, or raise if it is not a prime below 2**62."""
    if not isinstance(p, int) or p >= 1 << 62 or not is_prime(p):
        raise FieldError(f"modulus {p!r} is not a supported prime")
    return p


def inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise FieldError("non-invertible: 0 has no inverse mod %d" % p)
    return pow(a, -1, p)


def _require_odd(p: int) -> None:
    if p == 2:
        raise FieldError("quadratic residuosity is only defined here for odd p")


def is_qr(a: int, p: int) -> bool:
    """Euler's criterion.  ``a`` must be a unit and ``p`` odd."""
    _require_odd(p)
    a %= p
    if a == 0:
        raise FieldError("residuosity of 0 is not defined")
    return pow(a, (p - 1) // 2, p) == 1


def find_nonresidue(p: int, rng: random.Random) -> int:
    """Las Vegas search for a quadratic non-residue mod an odd prime."""
    _require_odd(p)
    while True:
        # 1 is always a square, so candidates start at 2
        cand = rng.randrange(2, p)
        if not is_qr(cand, p):
            return cand


def sqrt_mod(a: int, p: int, rng: random.Random | None = None,
             nonresidue: int | None = None) -> int:
    """Square root of ``a`` mod ``p`` (Tonelli-Shanks).

    Returns the smaller of the two roots.  A non-residue is needed only when
    ``p = 1 (mod 4)``; pass one in via ``nonresidue`` to skip the random
    search, otherwise ``rng`` is used to find it.
    """
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if not is_qr(a, p):
        raise FieldError(f"{a} is not a quadratic residue mod {p}")
    if p % 4 == 3:
        x = pow(a, (p + 1) // 4, p)
        return min(x, p - x)

    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    if nonresidue is None:
        if rng is None:
            raise ValueError("sqrt_mod needs an rng or a nonresidue when p = 1 mod 4")
        nonresidue = find_nonresidue(p, rng)
    c = pow(nonresidue, q, p)
    x = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        x = x * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return min(x, p - x)


def solve_ternary_diagonal(a: int, b: int, c: int, p: int,
                           rng: random.Random,
                           nonresidue: int | None = None) -> tuple[int, int, int]:
    """Nonzero (x, y, z) with a*x^2 + b*y^2 + c*z^2 = 0 mod an odd prime.

    A zero coefficient gives the matching unit vector.  Otherwise z is fixed
    to 1 and y is drawn at random until -(c + b*y^2)/a is a square; a
    nondegenerate conic always has points with z = 1.
    """
    _require_odd(p)
    a, b, c = a % p, b % p, c % p
    for k, coef in enumerate((a, b, c)):
        if coef == 0:
            out = [0, 0, 0]
            out[k] = 1
            return tuple(out)
    ainv = inv(a, p)
    while True:
        y = rng.randrange(p)
        t = -(c + b * y * y) * ainv % p
        if t == 0 or is_qr(t, p):
            return sqrt_mod(t, p, rng, nonresidue), y, 1


def solve_binary_inhomogeneous(alpha: int, b: int, p: int,
                               rng: random.Random,
                               nonresidue: int | None = None) -> tuple[int, int]:
    """(x, y) with x^2 + alpha*y^2 + b = 0 mod an odd prime, alpha != 0."""
    _require_odd(p)
    alpha, b = alpha % p, b % p
    if alpha == 0:
        raise FieldError("alpha must be nonzero")
    if b == 0:
        return 0, 0
    while True:
        y = rng.randrange(p)
        t = -(b + alpha * y * y) % p
        if t == 0 or is_qr(t, p):
            return sqrt_mod(t, p, rng, nonresidue), y
