"""Exact Fourier-sampling distributions over Z_p^k and the abelian HSP decoder.

For a family of unit vectors Psi_a (a in A = Z_p^k) the standard algorithm
measures the character register after a QFT and sees y with probability

    Pr[y] = |A|^-2 * || sum_a w^<y,a> Psi_a ||^2
          = |A|^-2 * sum_delta w^<y,delta> D(delta),
    D(delta) = sum_a <Psi_a | Psi_{a+delta}>.

Elements with identical states are grouped into classes first, so Gram
entries are computed once per pair of classes.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Sequence

from ..fplinalg import orthogonal_complement, row_space
from .cyclotomic import CycInt
from .states import FactorState, tensor_inner

__all__ = [
    "Distribution",
    "SampleBudgetExceeded",
    "distribution_from_gram",
    "fourier_sample_distribution",
    "fourier_distribution_from_labels",
    "abelian_hsp",
]


class SampleBudgetExceeded(RuntimeError):
    """The decoder ran out of samples; retrying with fresh randomness may succeed."""


@dataclass
class Distribution:
    p: int
    k: int
    outcomes: dict[tuple[int, ...], Fraction]

    def support(self) -> set[tuple[int, ...]]:
        return {y for y, pr in self.outcomes.items() if pr}

    def sample(self, rng: random.Random) -> tuple[int, ...]:
        items = sorted((y, pr) for y, pr in self.outcomes.items() if pr)
        den = math.lcm(*(pr.denominator for _, pr in items))
        r = rng.randrange(den)
        acc = 0
        for y, pr in items:
            acc += pr.numerator * (den // pr.denominator)
            if r < acc:
                return y
        raise AssertionError("distribution does not sum to one")


def _vectors(p: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(p), repeat=k))


def distribution_from_gram(p: int, k: int, classes: Sequence[Sequence[tuple[int, ...]]],
                           gram: dict[tuple[int, int], Fraction]) -> Distribution:
    """Exact outcome law given a partition of Z_p^k and the normalised Gram
    matrix between classes (only nonzero entries need be present)."""
    size = p ** k
    D: dict[tuple[int, ...], Fraction] = {}
    for (s, t), val in gram.items():
        if not val:
            continue
        for a in classes[s]:
            for b in classes[t]:
                delta = tuple((x - y) % p for x, y in zip(b, a))
                D[delta] = D.get(delta, 0) + val
    scale = math.lcm(*(Fraction(v).denominator for v in D.values())) if D else 1
    Dint = [(delta, int(v * scale)) for delta, v in D.items() if v]
    outcomes = {}
    for y in _vectors(p, k):
        coeffs = [0] * p
        for delta, v in Dint:
            coeffs[sum(a * b for a, b in zip(y, delta)) % p] += v
        val = CycInt(p, coeffs)
        if not val.is_rational():
            raise ArithmeticError(f"irrational outcome weight at y = {y}; input is not a hiding set")
        outcomes[y] = Fraction(val.to_int(), scale * size * size)
    if sum(outcomes.values()) != 1:
        raise ArithmeticError("outcome probabilities do not sum to one")
    return Distribution(p, k, outcomes)


def fourier_sample_distribution(p: int, k: int,
                                psi: Callable[[tuple[int, ...]], Sequence[FactorState]]) -> Distribution:
    """Outcome law for a quantum family a -> Psi_a given as lists of factor states."""
    classes: dict[tuple, list] = {}
    reps: list[Sequence[FactorState]] = []
    members: list[list[tuple[int, ...]]] = []
    for a in _vectors(p, k):
        st = tuple(psi(a))
        idx = classes.get(st)
        if idx is None:
            idx = classes[st] = len(reps)
            reps.append(st)
            members.append([])
        members[idx].append(a)

    norm = math.prod(s.norm_sq for s in reps[0])
    gram: dict[tuple[int, int], Fraction] = {}
    for s in range(len(reps)):
        gram[(s, s)] = Fraction(1)
        for t in range(s + 1, len(reps)):
            if [x.norm_sq for x in reps[s]] != [x.norm_sq for x in reps[t]]:
                raise ArithmeticError("factor norms differ between states")
            v = tensor_inner(reps[s], reps[t])
            if v.is_zero():
                continue
            if not v.is_rational():
                raise ArithmeticError("irrational Gram entry; input is not a hiding set")
            val = Fraction(v.to_int(), norm)
            gram[(s, t)] = val
            gram[(t, s)] = val
    return distribution_from_gram(p, k, members, gram)


def fourier_distribution_from_labels(p: int, k: int,
                                     f: Callable[[tuple[int, ...]], Hashable]) -> Distribution:
    """Outcome law for a classical hiding function (Psi_a = |f(a)>)."""
    fibres: dict[Hashable, list] = {}
    for a in _vectors(p, k):
        fibres.setdefault(f(a), []).append(a)
    members = list(fibres.values())
    gram = {(s, s): Fraction(1) for s in range(len(members))}
    return distribution_from_gram(p, k, members, gram)


def abelian_hsp(dist: Distribution, rng: random.Random,
                budget: int | None = None) -> tuple[list[list[int]], int]:
    """Sample characters until their span has been stable for k draws.

    Returns a basis of the orthogonal complement of the span (the hidden
    subgroup, when the samples have reached all of its annihilator) and the
    number of samples used.
    """
    p, k = dist.p, dist.k
    if budget is None:
        budget = 20 * k
    span: list[list[int]] = []
    stable = used = 0
    while stable < k:
        if used >= budget:
            raise SampleBudgetExceeded(f"no stable span after {used} samples")
        y = dist.sample(rng)
        used += 1
        new = row_space(span + [list(y)], p)
        if len(new) == len(span):
            stable += 1
        else:
            span, stable = new, 0
    return orthogonal_complement(span, k, p), used
