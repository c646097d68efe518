"""End-to-end hidden subgroup recovery in nil-2 p-groups of exponent p.

The hidden subgroup H has order 1 or p.  The quantum hiding procedure built
from an appropriate triple hides HG' in G, hence HG' cap Gbar in the abelian
group Gbar = Z_p^m; Fourier sampling recovers it, HG' is reassembled by adding
G', and a second (classical-oracle) abelian HSP inside HG' yields H.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from ..fplinalg import rank
from ..nil2 import Element, GroupSpec, closure
from .fourier import (SampleBudgetExceeded, abelian_hsp, fourier_distribution_from_labels,
                      fourier_sample_distribution)
from .states import (CosetOracle, FactorState, HidingTuple, PromiseError, act, hiding_state,
                     make_appropriate_triple, scale, tensor_equal, tensor_inner)

__all__ = [
    "HSPResult",
    "HSPFailure",
    "find_hidden_subgroup",
    "eigenvalue_identities_hold",
    "hiding_set_holds",
    "coset_representatives",
]


class HSPFailure(RuntimeError):
    def __init__(self, msg: str, attempts: list[dict]):
        super().__init__(msg)
        self.attempts = attempts


@dataclass
class HSPResult:
    subgroup: frozenset[Element]
    generators: list[Element]
    attempts: int
    samples: int
    diagnostics: list[dict] = field(default_factory=list)

    @property
    def retries(self) -> int:
        return self.attempts - 1


def _abelian_coordinates(G: GroupSpec, gens: Sequence[Element]) -> Callable[[Sequence[int]], Element]:
    def elem(c: Sequence[int]) -> Element:
        g = G.identity
        for gi, ci in zip(gens, c):
            if ci:
                g = G.mul(g, G.pow(gi, ci))
        return g
    return elem


def _attempt(G: GroupSpec, f, oracle: CosetOracle, rng: random.Random, diag: dict) -> list[Element] | None:
    p, m, d = G.p, G.m, G.d
    t = make_appropriate_triple(G, oracle, rng)
    diag["j_support"] = sum(1 for j in t.j_list if j)

    # HG' cap Gbar inside Gbar = Z_p^m, via the quantum hiding states
    dist = fourier_sample_distribution(p, m, lambda eb: hiding_state(G, t, G.lift(eb)))
    kbar, used1 = abelian_hsp(dist, rng)
    diag["gbar_dim"] = len(kbar)

    # HG' = (HG' cap Gbar) G'; the generator exponent vectors are independent
    gens = [G.lift(v) for v in kbar] + [G.z(k) for k in range(d)]
    vecs = [list(g.e) + list(g.f) for g in gens]
    assert not vecs or rank(vecs, p) == len(vecs)
    if any(G.commutator(a, b) != G.identity for a, b in itertools.combinations(gens, 2)):
        diag["failure"] = "recovered HG' is not abelian"
        return None

    elem = _abelian_coordinates(G, gens)
    dist2 = fourier_distribution_from_labels(p, len(gens), lambda c: f(elem(c)))
    hc, used2 = abelian_hsp(dist2, rng)
    diag["samples"] = used1 + used2
    hgens = [elem(c) for c in hc]

    target = f(G.identity)
    if any(f(h) != target for h in hgens):
        diag["failure"] = "a recovered generator is not in H"
        return None
    if len(closure(G, hgens)) not in (1, p):
        diag["failure"] = "recovered subgroup violates the order promise"
        return None
    return hgens


def find_hidden_subgroup(G: GroupSpec, f: Callable[[Element], Hashable], rng: random.Random,
                         max_retries: int = 10) -> HSPResult:
    """Recover the subgroup hidden by ``f``; Las Vegas with verified output."""
    oracle = CosetOracle(G, f)
    if oracle.hidden_order not in (1, G.p):
        raise PromiseError(f"hidden subgroup has order {oracle.hidden_order}, not 1 or {G.p}")
    attempts: list[dict] = []
    for _ in range(max_retries + 1):
        diag: dict = {}
        attempts.append(diag)
        try:
            hgens = _attempt(G, f, oracle, rng, diag)
        except SampleBudgetExceeded as exc:
            diag["failure"] = str(exc)
            continue
        if hgens is not None:
            total = sum(a.get("samples", 0) for a in attempts)
            return HSPResult(closure(G, hgens), hgens, len(attempts), total, attempts)
    raise HSPFailure(f"no verified result after {len(attempts)} attempts", attempts)


# -- verification helpers ------------------------------------------------------

def coset_representatives(G: GroupSpec, N: Iterable[Element]) -> list[Element]:
    """Least element of each left coset of the subgroup ``N``."""
    N = list(N)
    seen: set[Element] = set()
    reps = []
    for g in G.elements():
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul(g, n) for n in N)
    return reps


def eigenvalue_identities_hold(G: GroupSpec, base: FactorState, u: Sequence[int],
                               hidden: Iterable[Element], zs: Iterable[Element] | None = None) -> bool:
    """Check, for all j, the eigenvalue relations of |aHG'_u>:

    base . phi_j(z) = w^(<u,z> j^2) base   for z in G' (all of G' by default),
    base . phi_j(h) = w^(<u,z_h> (j - j^2)) base   for h in H.
    """
    p = G.p
    dot = lambda v: sum(a * b for a, b in zip(u, v)) % p
    if zs is None:
        zs = G.derived_elements()
    for j in range(p):
        for z in zs:
            if act(G, base, G.phi(j, z)) != scale(base, dot(z.f) * j * j):
                return False
        for h in hidden:
            k = dot(G.z_of(h).f) * (j - j * j)
            if act(G, base, G.phi(j, h)) != scale(base, k):
                return False
    return True


def hiding_set_holds(G: GroupSpec, t: HidingTuple, HGp_gens: Sequence[Element],
                     HGp: Iterable[Element]) -> bool:
    """Exhaustive check that g -> Psi_g hides HG' in G.

    Psi is invariant under right multiplication by each generator of HG'
    (hence constant on cosets), every factor has positive norm, and states
    of distinct cosets are orthogonal.  Equality is of product vectors: the
    factors themselves may pick up phases that cancel.
    """
    if any(b.norm_sq <= 0 for b in t.bases):
        return False
    reps = coset_representatives(G, HGp)
    states = [hiding_state(G, t, r) for r in reps]
    for r, st in zip(reps, states):
        for k in HGp_gens:
            if not tensor_equal(hiding_state(G, t, G.mul(r, k)), st):
                return False
    for a, b in itertools.combinations(range(len(reps)), 2):
        if not tensor_inner(states[a], states[b]).is_zero():
            return False
    return True
