"""Classical reductions for the HSP in small nilpotent groups.

Groups here are given explicitly: elements are the indices ``0..n-1`` and the
law is a multiplication table.  Every subroutine (normalizers, quotients,
composition chains, Sylow subgroups) is brute force, which is exact and fast
enough up to a few thousand elements.

The pipeline is

* split a nilpotent group into its Sylow subgroups,
* in a p-group, recover an arbitrary hidden subgroup by the normalizer
  iteration of :func:`algorithm1`, which only needs a sub-solver for hidden
  subgroups of order 1 or p,
* restrict such an instance to G* (elements of order dividing p), which is a
  subgroup of exponent p when p exceeds the nilpotency class.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .nil2 import Element, GroupSpec, ResourceError, max_group_order

__all__ = [
    "ExplicitGroup",
    "SubnormalChain",
    "ReductionError",
    "TableFormatError",
    "cyclic_group",
    "direct_product",
    "from_nil2",
    "modular_group",
    "sylow_decompose",
    "normalizer",
    "quotient",
    "subgroup_as_group",
    "prime_step_chain",
    "algorithm1",
    "brute_force_subsolver",
    "exponent_p_subgroup",
    "hall_coset_property",
    "nil2_presentation",
    "solve_nilpotent_hsp",
    "parse_table",
    "format_table",
]

DEFAULT_MAX_EXPLICIT = 10**4

Subsolver = Callable[["ExplicitGroup", Callable[[int], Hashable]], frozenset]


class ReductionError(ValueError):
    """The input group does not have the structure a reduction step needs."""


class TableFormatError(ValueError):
    pass


def _factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    q = 2
    while q * q <= n:
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
        q += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(eq=False)
class ExplicitGroup:
    table: list[list[int]]
    identity: int = 0
    labels: list | None = None
    _inv: list[int] | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        n = len(self.table)
        bound = max_group_order(DEFAULT_MAX_EXPLICIT)
        if n > bound:
            raise ResourceError(f"|G| = {n} exceeds the explicit-group bound {bound}")
        if n == 0 or any(len(r) != n for r in self.table):
            raise ReductionError("multiplication table must be square and nonempty")

    @classmethod
    def from_callback(cls, elements: Sequence, mul: Callable, identity) -> "ExplicitGroup":
        index = {x: i for i, x in enumerate(elements)}
        table = [[index[mul(a, b)] for b in elements] for a in elements]
        return cls(table, index[identity], list(elements))

    @property
    def order(self) -> int:
        return len(self.table)

    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        if self._inv is None:
            e = self.identity
            self._inv = [row.index(e) for row in self.table]
        return self._inv[a]

    def pow(self, a: int, k: int) -> int:
        r, base = self.identity, a
        if k < 0:
            base, k = self.inv(a), -k
        while k:
            if k & 1:
                r = self.table[r][base]
            base = self.table[base][base]
            k >>= 1
        return r

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        gens = [g for g in gens if g != self.identity]
        seen = {self.identity}
        queue = deque([self.identity])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return frozenset(seen)

    def is_subgroup(self, S: Iterable[int]) -> bool:
        S = set(S)
        if self.identity not in S:
            return False
        return all(self.table[a][b] in S for a in S for b in S)

    def is_normal(self, N: Iterable[int]) -> bool:
        N = frozenset(N)
        return all(self.conjugate_set(g, N) == N for g in self.elements())

    def conjugate_set(self, g: int, X: Iterable[int]) -> frozenset[int]:
        gi = self.inv(g)
        t = self.table
        return frozenset(t[t[g][x]][gi] for x in X)

    def is_abelian(self) -> bool:
        t = self.table
        n = len(t)
        return all(t[a][b] == t[b][a] for a in range(n) for b in range(a + 1, n))


@dataclass
class SubnormalChain:
    """G = G_1 > G_2 > ... > G_s > {1}; ``subgroups`` includes the trivial group."""

    subgroups: list[frozenset[int]]

    @property
    def length(self) -> int:
        return len(self.subgroups) - 1


# -- constructors -----------------------------------------------------------

def cyclic_group(n: int) -> ExplicitGroup:
    return ExplicitGroup([[(a + b) % n for b in range(n)] for a in range(n)], 0, list(range(n)))


def direct_product(A: ExplicitGroup, B: ExplicitGroup) -> ExplicitGroup:
    nb = B.order
    n = A.order * nb
    table = [[0] * n for _ in range(n)]
    for a1, a2 in itertools.product(range(A.order), repeat=2):
        ra = A.table[a1][a2] * nb
        for b1 in range(nb):
            row = table[a1 * nb + b1]
            brow = B.table[b1]
            base = a2 * nb
            for b2 in range(nb):
                row[base + b2] = ra + brow[b2]
    labels = None
    if A.labels is not None and B.labels is not None:
        labels = [(x, y) for x in A.labels for y in B.labels]
    return ExplicitGroup(table, A.identity * nb + B.identity, labels)


def from_nil2(G: GroupSpec) -> ExplicitGroup:
    elems = list(G.elements())
    return ExplicitGroup.from_callback(elems, G.mul, G.identity)


def modular_group(p: int, k: int = 2) -> ExplicitGroup:
    """M(p^(k+1)) = <a, b | a^(p^k) = b^p = 1, b a b^-1 = a^(1 + p^(k-1))>."""
    n = p ** k
    r = 1 + p ** (k - 1)
    elems = [(i, j) for i in range(n) for j in range(p)]

    def mul(x, y):
        (i1, j1), (i2, j2) = x, y
        # b^j1 a^i2 = a^(i2 r^j1) b^j1
        return ((i1 + i2 * pow(r, j1, n)) % n, (j1 + j2) % p)

    return ExplicitGroup.from_callback(elems, mul, (0, 0))


# -- structural operations ------------------------------------------------

def sylow_decompose(G: ExplicitGroup) -> dict[int, frozenset[int]]:
    """Sylow subgroups of a nilpotent group: {q: elements of q-power order}."""
    primes = sorted(_factor(G.order))
    parts: dict[int, set[int]] = {q: set() for q in primes}
    for g in G.elements():
        o = G.element_order(g)
        fac = _factor(o)
        if not fac:
            for q in primes:
                parts[q].add(g)
        elif len(fac) == 1:
            parts[next(iter(fac))].add(g)
    out = {q: frozenset(s) for q, s in parts.items()}
    for q, S in out.items():
        if not G.is_subgroup(S):
            raise ReductionError(f"elements of {q}-power order do not form a subgroup; "
                                 "the group is not nilpotent")
    if math.prod(len(S) for S in out.values()) != G.order:
        raise ReductionError("Sylow orders do not multiply to |G|; not nilpotent")
    return out


def normalizer(G: ExplicitGroup, X: Iterable[int]) -> frozenset[int]:
    X = frozenset(X)
    return frozenset(g for g in G.elements() if G.conjugate_set(g, X) == X)


def subgroup_as_group(G: ExplicitGroup, S: Iterable[int]) -> tuple[ExplicitGroup, list[int]]:
    """Re-index a subgroup as a standalone group; returns it with the embedding."""
    emb = sorted(S)
    pos = {g: i for i, g in enumerate(emb)}
    try:
        table = [[pos[G.table[a][b]] for b in emb] for a in emb]
    except KeyError:
        raise ReductionError("set is not closed under multiplication") from None
    labels = [G.labels[g] for g in emb] if G.labels is not None else None
    return ExplicitGroup(table, pos[G.identity], labels), emb


def quotient(G: ExplicitGroup, N: Iterable[int]) -> tuple[ExplicitGroup, list[int]]:
    """G/N with cosets indexed in order of their least element.

    Returns the quotient group and the projection as a list ``proj[g]``.
    """
    N = frozenset(N)
    if not G.is_subgroup(N) or not G.is_normal(N):
        raise ReductionError("quotient needs a normal subgroup")
    proj = [-1] * G.order
    reps: list[int] = []
    for g in G.elements():
        if proj[g] >= 0:
            continue
        k = len(reps)
        reps.append(g)
        for x in N:
            proj[G.table[g][x]] = k
    table = [[proj[G.table[a][b]] for b in reps] for a in reps]
    return ExplicitGroup(table, proj[G.identity], reps), proj


def _maximal_subgroup(G: ExplicitGroup) -> frozenset[int]:
    # Greedy: absorb elements in index order unless that would generate G.
    # Every element left out generates G together with the result, so the
    # result is maximal.
    gens: list[int] = []
    M = frozenset([G.identity])
    for g in G.elements():
        if g in M:
            continue
        cand = G.closure(gens + [g])
        if len(cand) < G.order:
            gens.append(g)
            M = cand
    return M


def prime_step_chain(G: ExplicitGroup) -> SubnormalChain:
    """A chain G = G_1 > ... > G_s > 1 of index-p steps, for a p-group G."""
    fac = _factor(G.order)
    if len(fac) > 1:
        raise ReductionError(f"|G| = {G.order} is not a prime power")
    chain = [frozenset(G.elements())]
    H, emb = G, list(G.elements())
    while H.order > 1:
        M = _maximal_subgroup(H)
        H, sub = subgroup_as_group(H, M)
        emb = [emb[i] for i in sub]
        chain.append(frozenset(emb))
    return SubnormalChain(chain)


# -- normalizer iteration ----------------------------------------------------------

def brute_force_subsolver(K: ExplicitGroup, f: Callable[[int], Hashable]) -> frozenset[int]:
    target = f(K.identity)
    return frozenset(g for g in K.elements() if f(g) == target)


@dataclass
class Algorithm1Result:
    subgroup: frozenset[int]
    calls: int
    rounds: int


def algorithm1(G: ExplicitGroup, f: Callable[[int], Hashable], P: Subsolver) -> Algorithm1Result:
    """Recover the subgroup hidden by ``f`` in a p-group ``G``.

    ``P(K, fK)`` must return the subgroup hidden by ``fK`` in the explicit
    group ``K`` whenever that subgroup has order 1 or p.
    """
    Ht = frozenset([G.identity])
    calls = rounds = 0
    while len(Ht) < G.order:
        rounds += 1
        N, emb_n = subgroup_as_group(G, normalizer(G, Ht))
        pos_n = {g: i for i, g in enumerate(emb_n)}
        Q, proj = quotient(N, [pos_n[h] for h in Ht])
        # coset representatives are the least element of each coset in N
        rep_in_G = [emb_n[r] for r in Q.labels]
        chain = prime_step_chain(Q)
        found = None
        # bottom-up: the smallest nontrivial chain member first
        for Qi in reversed(chain.subgroups[:-1]):
            K, emb_k = subgroup_as_group(Q, Qi)
            calls += 1
            try:
                S = P(K, lambda k, emb_k=emb_k: f(rep_in_G[emb_k[k]]))
            except Exception as exc:
                raise ReductionError(f"sub-solver failed on a subgroup of order {K.order}: {exc}") from exc
            if len(S) > 1:
                h = next(x for x in sorted(S) if x != K.identity)
                found = rep_in_G[emb_k[h]]
                break
        if found is None:
            break
        Ht = G.closure(list(Ht) + [found])
    return Algorithm1Result(Ht, calls, rounds)


# -- G* -------------------------------------------------------------------

def exponent_p_subgroup(G: ExplicitGroup, p: int) -> frozenset[int]:
    """G* = {g : g^p = 1}; raises if this set is not a subgroup."""
    if len(_factor(G.order)) > 1 or G.order % p:
        raise ReductionError(f"G is not a {p}-group")
    S = frozenset(g for g in G.elements() if G.pow(g, p) == G.identity)
    if not G.is_subgroup(S):
        raise ReductionError("elements of order dividing p do not form a subgroup "
                             "(p does not exceed the nilpotency class); not supported")
    return S


def hall_coset_property(G: ExplicitGroup, Gstar: Iterable[int], p: int) -> bool:
    """x -> x^p is constant on cosets G* x and distinct on different ones."""
    Gstar = frozenset(Gstar)
    pw = [G.pow(g, p) for g in G.elements()]
    for x in G.elements():
        for y in G.elements():
            same = G.table[x][G.inv(y)] in Gstar
            if same != (pw[x] == pw[y]):
                return False
    return True


# -- adapter to structure-constant presentations -----------------------------

def nil2_presentation(K: ExplicitGroup, p: int) -> tuple[GroupSpec, list[Element]]:
    """Present an explicit nil-2 group of exponent p by structure constants.

    Returns the presentation and ``to_elem`` mapping each index of ``K`` to its normal
    form.  Raises :class:`ReductionError` if ``K`` is not such a group.
    """
    if K.order == 1 or len(_factor(K.order)) > 1 or K.order % p:
        raise ReductionError("need a nontrivial p-group")
    if any(K.pow(g, p) != K.identity for g in K.elements()):
        raise ReductionError("group does not have exponent p")
    comm = lambda a, b: K.mul(K.mul(K.inv(a), K.inv(b)), K.mul(a, b))
    derived = K.closure({comm(a, b) for a in K.elements() for b in K.elements()})
    if any(K.mul(z, g) != K.mul(g, z) for z in derived for g in K.elements()):
        raise ReductionError("derived subgroup is not central (class > 2)")

    def greedy_basis(target: frozenset[int], start: frozenset[int]) -> list[int]:
        basis, span = [], start
        for g in sorted(target):
            if g not in span:
                basis.append(g)
                span = K.closure(list(span) + [g])
        return basis

    zs = greedy_basis(derived, frozenset([K.identity]))
    xs = greedy_basis(frozenset(K.elements()), derived)
    m, d = len(xs), len(zs)

    zcoord: dict[int, tuple[int, ...]] = {}
    for f in itertools.product(range(p), repeat=d):
        g = K.identity
        for zk, fk in zip(zs, f):
            g = K.mul(g, K.pow(zk, fk))
        zcoord[g] = f
    c = {}
    for i, j in itertools.combinations(range(m), 2):
        c[(i, j)] = zcoord[comm(xs[j], xs[i])]
    pres = GroupSpec(p, m, d, c)

    to_elem: list[Element | None] = [None] * K.order
    for e in itertools.product(range(p), repeat=m):
        g = K.identity
        for xi, ei in zip(xs, e):
            g = K.mul(g, K.pow(xi, ei))
        for zg, f in zcoord.items():
            to_elem[K.mul(g, zg)] = Element(e, f)
    if any(x is None for x in to_elem):
        raise ReductionError("normal forms do not cover the group")
    return pres, to_elem


def solve_nilpotent_hsp(G: ExplicitGroup, f: Callable[[int], Hashable],
                        inner: Subsolver = brute_force_subsolver) -> dict:
    """Sylow split, then the normalizer iteration in each part with a G*-restricted sub-solver.

    ``inner`` only ever sees groups of exponent p whose hidden subgroup has
    order 1 or p.  Returns a dict with the recovered subgroup and diagnostics.
    """
    parts = sylow_decompose(G)
    found: list[frozenset[int]] = []
    per_prime = {}
    for q, S in parts.items():
        Gq, emb = subgroup_as_group(G, S)
        fq = lambda k, emb=emb: f(emb[k])

        def P(K, fK, q=q):
            star, emb_s = subgroup_as_group(K, exponent_p_subgroup(K, q))
            res = inner(star, lambda k: fK(emb_s[k]))
            return frozenset(emb_s[k] for k in res)

        res = algorithm1(Gq, fq, P)
        found.append(frozenset(emb[k] for k in res.subgroup))
        per_prime[q] = {"order": len(S), "hidden_order": len(res.subgroup),
                        "calls": res.calls, "rounds": res.rounds}
    H = G.closure(set().union(*found))
    return {"subgroup": H, "parts": per_prime}


# -- file format ------------------------------------------------------------

def parse_table(text: str) -> tuple[ExplicitGroup, list[int] | None]:
    """``n`` then n rows of n indices, optionally ``hidden g1 g2 ...`` at the end."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    hidden = None
    if lines and lines[-1][0] == "hidden":
        try:
            hidden = [int(x) for x in lines[-1][1:]]
        except ValueError:
            raise TableFormatError("bad 'hidden' line") from None
        lines = lines[:-1]
    try:
        n = int(lines[0][0]) if lines and len(lines[0]) == 1 else None
        if n is None:
            raise TableFormatError("first line must be the group order n")
        rows = [[int(x) for x in ln] for ln in lines[1:]]
    except ValueError as exc:
        if isinstance(exc, TableFormatError):
            raise
        raise TableFormatError(f"non-integer token: {exc}") from None
    if len(rows) != n or any(len(r) != n for r in rows):
        raise TableFormatError(f"expected {n} rows of {n} indices")
    if any(not 0 <= x < n for r in rows for x in r):
        raise TableFormatError("index out of range")
    ident = [i for i in range(n) if rows[i] == list(range(n))]
    if not ident:
        raise TableFormatError("table has no identity element")
    G = ExplicitGroup(rows, ident[0])
    if any(sorted(r) != list(range(n)) for r in rows) or \
            any(sorted(G.table[i][j] for i in range(n)) != list(range(n)) for j in range(n)):
        raise TableFormatError("table is not a Latin square")
    if hidden is not None and any(not 0 <= h < n for h in hidden):
        raise TableFormatError("hidden generator out of range")
    return G, hidden


def format_table(G: ExplicitGroup, hidden: Sequence[int] | None = None) -> str:
    out = [str(G.order)] + [" ".join(map(str, r)) for r in G.table]
    if hidden is not None:
        out.append("hidden " + " ".join(map(str, hidden)))
    return "\n".join(out) + "\n"
