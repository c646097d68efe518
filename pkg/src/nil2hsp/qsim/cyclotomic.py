"""Exact arithmetic in Z[w], w a primitive p-th root of unity.

Values are stored as integer coefficient tuples on 1, w, ..., w^(p-1) and
kept canonical by using 1 + w + ... + w^(p-1) = 0 to clear the top
coefficient.  The remaining p-1 coordinates are a Z-basis, so equality of
canonical tuples is equality of numbers.
"""

from __future__ import annotations

import cmath
from fractions import Fraction


class CycInt:
    __slots__ = ("p", "c")

    def __init__(self, p: int, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) != p:
            raise ValueError(f"expected {p} coefficients")
        top = coeffs[-1]
        if top:
            coeffs = [x - top for x in coeffs]
        self.p = p
        self.c = tuple(coeffs)

    @classmethod
    def from_int(cls, p: int, n: int) -> "CycInt":
        return cls(p, [n] + [0] * (p - 1))

    @classmethod
    def root(cls, p: int, k: int = 1) -> "CycInt":
        """w^k."""
        c = [0] * p
        c[k % p] = 1
        return cls(p, c)

    def _coerce(self, other) -> "CycInt":
        if isinstance(other, CycInt):
            if other.p != self.p:
                raise ValueError("mixing roots of unity of different orders")
            return other
        if isinstance(other, int):
            return CycInt.from_int(self.p, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycInt(self.p, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.p, [-a for a in self.c])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycInt(self.p, [a - b for a, b in zip(self.c, o.c)])

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, int):
            return CycInt(self.p, [a * other for a in self.c])
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        out = [0] * p
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        out[(i + j) % p] += a * b
        return CycInt(p, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        r, base = CycInt.from_int(self.p, 1), self
        while k:
            if k & 1:
                r = r * base
            base = base * base
            k >>= 1
        return r

    def rotate(self, k: int) -> "CycInt":
        """Multiply by w^k."""
        p = self.p
        k %= p
        if k == 0:
            return self
        out = [0] * p
        for i, a in enumerate(self.c):
            out[(i + k) % p] = a
        return CycInt(p, out)

    def conj(self) -> "CycInt":
        p = self.p
        out = [0] * p
        for i, a in enumerate(self.c):
            out[-i % p] = a
        return CycInt(p, out)

    def abs2(self) -> "CycInt":
        return self * self.conj()

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_int(self) -> int:
        if not self.is_rational():
            raise ArithmeticError(f"{self!r} is not rational")
        return self.c[0]

    def to_fraction(self) -> Fraction:
        return Fraction(self.to_int())

    def to_complex(self) -> complex:
        w = cmath.exp(2j * cmath.pi / self.p)
        return sum(a * w ** i for i, a in enumerate(self.c))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_rational() and self.c[0] == other
        if isinstance(other, CycInt):
            return self.p == other.p and self.c == other.c
        return NotImplemented

    def __hash__(self):
        # rational values compare equal to plain ints
        if self.is_rational():
            return hash(self.c[0])
        return hash((self.p, self.c))

    def __repr__(self):
        terms = [f"{a}w^{i}" if i else str(a) for i, a in enumerate(self.c) if a]
        return f"CycInt<{self.p}>({' + '.join(terms) or '0'})"
