"""Nil-2 p-groups of exponent p given by commutator structure constants.

A group with parameters (m, d) is generated by x_1..x_m with derived
subgroup G' = <z_1..z_d> = Z_p^d central, and relations

    [x_j, x_i] = z^{c(i,j)}   for i < j,

where [a, b] = a^-1 b^-1 a b.  Every element has a unique normal form
x_1^e_1 ... x_m^e_m z_1^f_1 ... z_d^f_d, stored as an ``Element(e, f)``.
Generator indices are 0-based in code and 1-based in files.
"""

from __future__ import annotations

import itertools
import os
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, NamedTuple, Sequence

from . import fp
from .fplinalg import rank

__all__ = [
    "Element",
    "GroupSpec",
    "ResourceError",
    "GroupFormatError",
    "max_group_order",
    "heisenberg",
    "random_group",
    "random_hidden_subgroup",
    "closure",
    "hiding_function",
    "brute_force_hsp",
    "parse_group",
    "format_group",
]

DEFAULT_MAX_ORDER = 10**6


class ResourceError(RuntimeError):
    """An enumeration would exceed the configured size bound."""


class GroupFormatError(ValueError):
    pass


def max_group_order(default: int = DEFAULT_MAX_ORDER) -> int:
    """Size bound for enumerations; ``HSP_MAX_GROUP_ORDER`` overrides it."""
    env = os.environ.get("HSP_MAX_GROUP_ORDER")
    return int(env) if env else default


class Element(NamedTuple):
    e: tuple[int, ...]
    f: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """Structure constants ``c[(i, j)]`` (0-based, i < j) in Z_p^d."""

    p: int
    m: int
    d: int
    c: dict[tuple[int, int], tuple[int, ...]]
    _terms: list = field(init=False, repr=False)

    def __post_init__(self):
        p, m, d = self.p, self.m, self.d
        fp.check_prime(p)
        if p == 2:
            raise ValueError("exponent-2 nil-2 groups are abelian; p must be odd")
        if m < 1 or d < 0:
            raise ValueError("need m >= 1 and d >= 0")
        if d > m * (m - 1) // 2:
            raise ValueError(f"d = {d} exceeds m(m-1)/2 = {m * (m - 1) // 2}")
        c = {}
        for i, j in itertools.combinations(range(m), 2):
            vec = tuple(x % p for x in self.c.get((i, j), (0,) * d))
            if len(vec) != d:
                raise ValueError(f"c{(i, j)} must have length {d}")
            c[(i, j)] = vec
        if set(self.c) - set(c):
            raise ValueError("structure constants must be indexed by pairs i < j < m")
        if d and rank(list(c.values()), p) != d:
            raise ValueError("structure constants do not span Z_p^d")
        object.__setattr__(self, "c", c)
        terms = [(i, j, [(k, x) for k, x in enumerate(v) if x])
                 for (i, j), v in c.items() if any(v)]
        object.__setattr__(self, "_terms", terms)

    def __eq__(self, other):
        if not isinstance(other, GroupSpec):
            return NotImplemented
        return (self.p, self.m, self.d, self.c) == (other.p, other.m, other.d, other.c)

    # -- elements ---------------------------------------------------------

    @property
    def order(self) -> int:
        return self.p ** (self.m + self.d)

    @property
    def identity(self) -> Element:
        return Element((0,) * self.m, (0,) * self.d)

    def element(self, e: Sequence[int], f: Sequence[int] | None = None) -> Element:
        p = self.p
        if f is None:
            f = (0,) * self.d
        if len(e) != self.m or len(f) != self.d:
            raise ValueError("element has the wrong shape for this group")
        return Element(tuple(x % p for x in e), tuple(x % p for x in f))

    def x(self, i: int) -> Element:
        """Generator x_{i+1}."""
        e = [0] * self.m
        e[i] = 1
        return self.element(e)

    def z(self, k: int) -> Element:
        """Central generator z_{k+1}."""
        f = [0] * self.d
        f[k] = 1
        return self.element((0,) * self.m, f)

    def elements(self) -> Iterator[Element]:
        """All elements in lexicographic (e, f) order."""
        if self.order > max_group_order():
            raise ResourceError(f"|G| = {self.order} exceeds the enumeration bound")
        vals = range(self.p)
        fs = list(itertools.product(vals, repeat=self.d))
        for e in itertools.product(vals, repeat=self.m):
            for f in fs:
                yield Element(e, f)

    def derived_elements(self) -> list[Element]:
        zero = (0,) * self.m
        return [Element(zero, f) for f in itertools.product(range(self.p), repeat=self.d)]

    def random_element(self, rng: random.Random) -> Element:
        p = self.p
        return Element(tuple(rng.randrange(p) for _ in range(self.m)),
                       tuple(rng.randrange(p) for _ in range(self.d)))

    def _check(self, g: Element) -> None:
        if len(g.e) != self.m or len(g.f) != self.d:
            raise ValueError("element dimensions do not match the group")

    # -- arithmetic -------------------------------------------------------

    def _beta(self, e1: Sequence[int], e2: Sequence[int]) -> list[int]:
        # collection correction sum_{i<j} e1_j * e2_i * c(i,j)
        out = [0] * self.d
        for i, j, vec in self._terms:
            t = e1[j] * e2[i]
            if t:
                for k, x in vec:
                    out[k] += t * x
        return out

    def quad(self, e: Sequence[int]) -> list[int]:
        """Q(e) = sum_{i<j} e_j e_i c(i,j), unreduced."""
        return self._beta(e, e)

    def mul(self, g: Element, h: Element) -> Element:
        if len(g.e) != self.m or len(h.e) != self.m or len(g.f) != self.d or len(h.f) != self.d:
            raise ValueError("element dimensions do not match the group")
        p = self.p
        corr = self._beta(g.e, h.e) if self._terms else None
        e = tuple((a + b) % p for a, b in zip(g.e, h.e))
        if corr is None:
            f = tuple((a + b) % p for a, b in zip(g.f, h.f))
        else:
            f = tuple((a + b + c) % p for a, b, c in zip(g.f, h.f, corr))
        return Element(e, f)

    def pow(self, g: Element, k: int) -> Element:
        # g^k = (k e, k f + C(k,2) Q(e)); C(k,2) mod p has period p for odd p
        self._check(g)
        p = self.p
        k %= p
        binom = k * (k - 1) // 2
        q = self.quad(g.e)
        return Element(tuple(k * x % p for x in g.e),
                       tuple((k * a + binom * b) % p for a, b in zip(g.f, q)))

    def inv(self, g: Element) -> Element:
        self._check(g)
        p = self.p
        q = self.quad(g.e)
        return Element(tuple(-x % p for x in g.e),
                       tuple((b - a) % p for a, b in zip(g.f, q)))

    def commutator(self, g: Element, h: Element) -> Element:
        """[g, h] = g^-1 h^-1 g h = z^{beta(g,h) - beta(h,g)}."""
        self._check(g)
        self._check(h)
        p = self.p
        a = self._beta(g.e, h.e)
        b = self._beta(h.e, g.e)
        return Element((0,) * self.m, tuple((x - y) % p for x, y in zip(a, b)))

    def phi(self, j: int, g: Element) -> Element:
        """The automorphism x_i -> x_i^j (j != 0); phi_0 is the constant map to 1."""
        self._check(g)
        p = self.p
        j %= p
        if j == 0:
            return self.identity
        j2 = j * j % p
        return Element(tuple(j * x % p for x in g.e), tuple(j2 * x % p for x in g.f))

    def z_of(self, g: Element) -> Element:
        """The unique z_g in G' with phi_j(g) = g^j z_g^(j - j^2) for all j."""
        self._check(g)
        p = self.p
        half = pow(2, -1, p)
        q = self.quad(g.e)
        return Element((0,) * self.m, tuple((b * half - a) % p for a, b in zip(g.f, q)))

    def bar(self, g: Element) -> tuple[int, ...]:
        return g.e

    def lift(self, ebar: Sequence[int]) -> Element:
        return self.element(ebar)

    def bar_mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return self.mul(self.lift(a), self.lift(b)).e

    def in_derived(self, g: Element) -> bool:
        return not any(g.e)

    def is_abelian(self) -> bool:
        return not self._terms


def heisenberg(p: int) -> GroupSpec:
    """The Heisenberg group of order p^3 with [x_2, x_1] = z."""
    return GroupSpec(p, 2, 1, {(0, 1): (1,)})


def random_group(p: int, m: int, d: int, rng: random.Random) -> GroupSpec:
    """Uniform structure constants, resampled until they span Z_p^d."""
    fp.check_prime(p)
    if d > m * (m - 1) // 2:
        raise ValueError(f"d = {d} exceeds m(m-1)/2 = {m * (m - 1) // 2}")
    pairs = list(itertools.combinations(range(m), 2))
    while True:
        c = {ij: tuple(rng.randrange(p) for _ in range(d)) for ij in pairs}
        if d == 0 or rank(list(c.values()), p) == d:
            return GroupSpec(p, m, d, c)


def random_hidden_subgroup(G: GroupSpec, order: int, rng: random.Random) -> list[Element]:
    """Generators of a random subgroup of order 1 or p."""
    if order == 1:
        return []
    if order != G.p:
        raise ValueError("hidden subgroups are generated with order 1 or p")
    while True:
        h = G.random_element(rng)
        if h != G.identity:
            return [h]


def closure(G, gens: Iterable, bound: int | None = None) -> frozenset:
    """Subgroup generated by ``gens`` (breadth-first under right multiplication).

    Works for any object with ``mul`` and ``identity``.
    """
    if bound is None:
        bound = max_group_order()
    gens = [g for g in gens if g != G.identity]
    seen = {G.identity}
    queue = deque([G.identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = G.mul(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) > bound:
                    raise ResourceError(f"subgroup closure exceeds bound {bound}")
                queue.append(y)
    return frozenset(seen)


def hiding_function(G: GroupSpec, H: Iterable[Element]) -> Callable[[Element], Element]:
    """f(g) = lexicographically least element of the left coset gH."""
    Hset = sorted(closure(G, H))
    if len(Hset) == 1:
        return lambda g: g
    mul = G.mul

    def f(g: Element) -> Element:
        return min(mul(g, h) for h in Hset)

    return f


def brute_force_hsp(G: GroupSpec, f: Callable[[Element], Hashable]) -> frozenset:
    """H = {g : f(g) = f(1)} by exhaustive search."""
    target = f(G.identity)
    return frozenset(g for g in G.elements() if f(g) == target)


def format_group(G: GroupSpec) -> str:
    out = [f"{G.p} {G.m} {G.d}"]
    for (i, j), vec in sorted(G.c.items()):
        out.append(" ".join(map(str, (i + 1, j + 1) + vec)))
    return "\n".join(out) + "\n"


def parse_group(text: str) -> GroupSpec:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    try:
        if not lines or len(lines[0]) != 3:
            raise GroupFormatError("header must be 'p m d'")
        p, m, d = (int(x) for x in lines[0])
        body = [[int(x) for x in ln] for ln in lines[1:]]
    except ValueError as exc:
        if isinstance(exc, GroupFormatError):
            raise
        raise GroupFormatError(f"non-integer token: {exc}") from None
    pairs = list(itertools.combinations(range(1, m + 1), 2)) if m >= 1 else []
    if len(body) != len(pairs):
        raise GroupFormatError(f"expected {len(pairs)} structure-constant lines")
    c = {}
    for (i, j), row in zip(pairs, body):
        if len(row) != 2 + d or (row[0], row[1]) != (i, j):
            raise GroupFormatError(f"expected line 'i j c_1..c_d' for pair ({i}, {j})")
        c[(i - 1, j - 1)] = tuple(row[2:])
    try:
        return GroupSpec(p, m, d, c)
    except ValueError as exc:
        raise GroupFormatError(str(exc)) from None
