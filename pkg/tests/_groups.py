"""Small explicit p-groups (p = 3, order <= 3^5) for reduction tests."""

from __future__ import annotations

import random

from nil2hsp import reduction as red
from nil2hsp.nil2 import heisenberg, random_group


def p_group_catalogue(rng: random.Random) -> list[tuple[str, red.ExplicitGroup]]:
    C = red.cyclic_group
    H3 = red.from_nil2(heisenberg(3))
    return [
        ("Z3", C(3)),
        ("Z9", C(9)),
        ("Z27", C(27)),
        ("Z3^3", red.from_nil2(random_group(3, 3, 0, rng))),
        ("Z9xZ3", red.direct_product(C(9), C(3))),
        ("Heis3", H3),
        ("M27", red.modular_group(3)),
        ("Heis3xZ3", red.direct_product(H3, C(3))),
        ("Heis3xZ9", red.direct_product(H3, C(9))),
        ("M27xZ3", red.direct_product(red.modular_group(3), C(3))),
        ("nil2(3,3,2)", red.from_nil2(random_group(3, 3, 2, rng))),
        ("nil2(3,4,1)", red.from_nil2(random_group(3, 4, 1, rng))),
        ("M81", red.modular_group(3, 3)),
    ]


def random_subgroup(G: red.ExplicitGroup, rng: random.Random) -> frozenset[int]:
    k = rng.choice([0, 1, 1, 2, 2, 3])
    return G.closure(rng.randrange(G.order) for _ in range(k))


def coset_label_function(G: red.ExplicitGroup, H):
    H = sorted(H)
    return lambda g: min(G.mul(g, h) for h in H)
