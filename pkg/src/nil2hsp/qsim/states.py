"""Sparse factor states over a nil-2 group and the hiding-state construction.

A factor state is an unnormalised vector in C^G with cyclotomic-integer
amplitudes.  Its squared norm is kept alongside, so normalisation (and the
irrational 1/sqrt factors it would bring) never has to be carried out.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

from ..nil2 import Element, GroupSpec, closure
from ..quadsys import QuadLinSystem, full_size, solve_full_system
from .cyclotomic import CycInt

__all__ = [
    "FactorState",
    "CosetOracle",
    "HidingTuple",
    "PromiseError",
    "left_coset",
    "coset_state_family",
    "act",
    "scale",
    "inner",
    "tensor_inner",
    "tensor_equal",
    "sample_u",
    "make_appropriate_triple",
    "hiding_state",
]


class PromiseError(ValueError):
    """The hidden subgroup violates the order-1-or-p promise."""


class FactorState:
    __slots__ = ("p", "amps", "norm_sq", "_hash")

    def __init__(self, p: int, amps: dict[Element, CycInt], norm_sq: int | None = None):
        self.p = p
        self.amps = amps
        if norm_sq is None:
            total = CycInt.from_int(p, 0)
            for a in amps.values():
                total = total + a.abs2()
            norm_sq = total.to_int()
        self.norm_sq = norm_sq
        self._hash = None

    @property
    def support(self) -> frozenset[Element]:
        return frozenset(self.amps)

    def __eq__(self, other):
        if not isinstance(other, FactorState):
            return NotImplemented
        return self is other or (self.p == other.p and self.amps == other.amps)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.amps.items()))
        return self._hash

    def __repr__(self):
        return f"FactorState(p={self.p}, support={len(self.amps)}, norm_sq={self.norm_sq})"


def left_coset(G: GroupSpec, a: Element, H: Iterable[Element]) -> list[Element]:
    return sorted({G.mul(a, h) for h in closure(G, H)})


class CosetOracle:
    """Simulates measuring the oracle register: fibres of f over all of G.

    ``coset(a)`` is the set aH the state collapses to when the measured label
    is f(a).  All fibres of a hiding function have size |H|.
    """

    def __init__(self, G: GroupSpec, f: Callable[[Element], Hashable]):
        self.G = G
        self.f = f
        fibres: dict[Hashable, list[Element]] = {}
        for g in G.elements():
            fibres.setdefault(f(g), []).append(g)
        self._fibres = fibres
        sizes = {len(v) for v in fibres.values()}
        if len(sizes) != 1:
            raise ValueError("f is not a hiding function: fibres have different sizes")
        self.hidden_order = sizes.pop()

    def coset(self, a: Element) -> list[Element]:
        return self._fibres[self.f(a)]


def coset_state_family(G: GroupSpec, coset: Sequence[Element]) -> dict[tuple, tuple[FactorState, Fraction]]:
    """States |aHG'_u> and their measurement probabilities, for every u.

    ``coset`` is the set aH.  The unnormalised state for u is
    sum_{x in aH, z in G'} w^(-<u,z>) |x z>; amplitudes of coinciding basis
    elements add up.  u's of probability zero map to an empty state.
    """
    p, d = G.p, G.d
    derived = G.derived_elements()
    prods = [(G.mul(x, z), z.f) for x in coset for z in derived]
    family = {}
    total = 0
    for u in itertools.product(range(p), repeat=d):
        acc: dict[Element, list[int]] = {}
        for key, zf in prods:
            k = -sum(a * b for a, b in zip(u, zf)) % p
            coeffs = acc.get(key)
            if coeffs is None:
                coeffs = acc[key] = [0] * p
            coeffs[k] += 1
        amps = {}
        for key, coeffs in acc.items():
            a = CycInt(p, coeffs)
            if not a.is_zero():
                amps[key] = a
        st = FactorState(p, amps)
        family[u] = st
        total += st.norm_sq
    return {u: (st, Fraction(st.norm_sq, total)) for u, st in family.items()}


def act(G: GroupSpec, state: FactorState, g: Element) -> FactorState:
    """Right multiplication of every basis element by g."""
    if g == G.identity:
        return state
    mul = G.mul
    return FactorState(state.p, {mul(x, g): a for x, a in state.amps.items()}, state.norm_sq)


def scale(state: FactorState, k: int) -> FactorState:
    """Multiply the state by w^k."""
    if k % state.p == 0:
        return state
    return FactorState(state.p, {x: a.rotate(k) for x, a in state.amps.items()}, state.norm_sq)


def inner(s1: FactorState, s2: FactorState) -> CycInt:
    """<s1|s2>, conjugate-linear in the first argument."""
    p = s1.p
    if s1 is s2:
        return CycInt.from_int(p, s1.norm_sq)
    a1, a2 = s1.amps, s2.amps
    total = CycInt.from_int(p, 0)
    if len(a1) <= len(a2):
        for x, a in a1.items():
            b = a2.get(x)
            if b is not None:
                total = total + a.conj() * b
    else:
        for x, b in a2.items():
            a = a1.get(x)
            if a is not None:
                total = total + a.conj() * b
    return total


def tensor_inner(l1: Sequence[FactorState], l2: Sequence[FactorState]) -> CycInt:
    """Inner product of two product states; stops at the first zero factor."""
    p = l1[0].p
    out = CycInt.from_int(p, 1)
    # identical factors are cheap, so look for a vanishing factor among the rest first
    order = sorted(range(len(l1)), key=lambda i: l1[i] is l2[i])
    for i in order:
        v = inner(l1[i], l2[i])
        if v.is_zero():
            return v
        out = out * v
    return out


def tensor_equal(l1: Sequence[FactorState], l2: Sequence[FactorState]) -> bool:
    """Equality of the product vectors, which may differ factorwise by phases.

    With equal norms, <a|b> = |a|^2 holds exactly when a = b.
    """
    if all(a == b for a, b in zip(l1, l2)):
        return True
    n1 = math.prod(s.norm_sq for s in l1)
    if n1 != math.prod(s.norm_sq for s in l2):
        return False
    return tensor_inner(l1, l2) == n1


def sample_u(family: dict, rng: random.Random) -> tuple:
    """Draw u from the exact distribution of a coset-state family."""
    items = sorted(family.items())
    den = math.lcm(*(pr.denominator for _, (_, pr) in items))
    r = rng.randrange(den)
    acc = 0
    for u, (_, pr) in items:
        acc += pr.numerator * (den // pr.denominator)
        if r < acc:
            return u
    raise AssertionError("probabilities do not sum to one")


@dataclass
class HidingTuple:
    """An appropriate triple (a, u, j) with the base states |a_i H G'_{u_i}>."""

    a_list: list[Element]
    u_list: list[tuple[int, ...]]
    j_list: list[int]
    bases: list[FactorState] = field(repr=False)


def make_appropriate_triple(G: GroupSpec, oracle: CosetOracle, rng: random.Random) -> HidingTuple:
    """Prepare n = (d+1)^2 (d+2)/2 coset states, measure their u's, solve for j."""
    n = full_size(G.d)
    a_list, u_list, bases = [], [], []
    for _ in range(n):
        a = G.random_element(rng)
        family = coset_state_family(G, oracle.coset(a))
        u = sample_u(family, rng)
        a_list.append(a)
        u_list.append(u)
        bases.append(family[u][0])
    sys = QuadLinSystem.from_columns(G.p, u_list, G.d)
    j = solve_full_system(sys, rng)
    return HidingTuple(a_list, u_list, j, bases)


def hiding_state(G: GroupSpec, t: HidingTuple, g: Element) -> list[FactorState]:
    """Factor list of Psi_g = tensor_i |a_i H G'_{u_i} . phi_{j_i}(g)>."""
    return [act(G, base, G.phi(j, g)) for base, j in zip(t.bases, t.j_list)]
