"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in
the terminal summary) or ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from fractions import Fraction

from _groups import coset_label_function, p_group_catalogue, random_subgroup
from _laws import LAWS
from nil2hsp import reduction as red
from nil2hsp.cli import bench_report
from nil2hsp.fplinalg import mat_vec
from nil2hsp.nil2 import (brute_force_hsp, closure, heisenberg, hiding_function, random_group,
                          random_hidden_subgroup)
from nil2hsp.qsim import (CosetOracle, eigenvalue_identities_hold, find_hidden_subgroup,
                          fourier_sample_distribution, hiding_set_holds, hiding_state,
                          make_appropriate_triple)
from nil2hsp.quadsys import (QuadLinSystem, block_size, check_solution, full_size,
                             solve_full_system, solve_quadratic_block)

SOLVER_PRIMES = [3, 5, 7, 13, 101, 1009]


def _random_rows(p, d, n, rng):
    return tuple(tuple(rng.randrange(p) for _ in range(n)) for _ in range(d))


def test_criterion_1_full_solver_totality(report_line):
    rng = random.Random(1)
    failures = total = 0
    t0 = time.perf_counter()
    for p in SOLVER_PRIMES:
        for d in range(1, 6):
            n = full_size(d)
            for _ in range(1000):
                sys_ = QuadLinSystem(p, d, n, _random_rows(p, d, n, rng))
                total += 1
                if not check_solution(sys_.U, solve_full_system(sys_, rng), p):
                    failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 300
    report_line(1, ok, f"{total} systems, {failures} failures, {elapsed:.1f} s (limit 300 s)")
    assert ok


def test_criterion_2_block_solver_and_p2(report_line):
    rng = random.Random(2)
    failures = total = 0
    for p in SOLVER_PRIMES:
        for d in range(1, 6):
            n = block_size(d)
            for _ in range(1000):
                U = _random_rows(p, d, n, rng)
                total += 1
                if not check_solution(U, solve_quadratic_block(U, p, rng), p, linear=False):
                    failures += 1
    p2_fail = 0
    for d in range(1, 6):
        n = full_size(d)
        for _ in range(1000):
            sys_ = QuadLinSystem(2, d, n, _random_rows(2, d, n, rng))
            if not check_solution(sys_.U, solve_full_system(sys_, rng), 2):
                p2_fail += 1
    ok = failures == 0 and p2_fail == 0
    report_line(2, ok, f"block solver {total} systems, {failures} failures; "
                       f"p=2 branch 5000 systems, {p2_fail} failures")
    assert ok


def test_criterion_3_chevalley_warning(report_line):
    rng = random.Random(3)
    p = 3
    bad = []
    for d in (1, 2):
        n = 3 * d + 1
        vecs = list(itertools.product(range(p), repeat=n))
        for _ in range(100):
            U = [[rng.randrange(p) for _ in range(n)] for _ in range(d)]
            count = sum(1 for v in vecs if not any(mat_vec(U, v, p))
                        and not any(mat_vec(U, [x * x for x in v], p)))
            if count % p or count < 2:
                bad.append((d, U, count))
    ok = not bad
    report_line(3, ok, f"p=3, d in {{1,2}}, n=3d+1, 200 matrices: {len(bad)} violations")
    assert ok


def test_criterion_4_group_laws(report_line):
    params = [(p, m, d) for p in (3, 5) for m in (2, 3, 4) for d in (1, 2, 3)
              if d <= m * (m - 1) // 2]
    rng = random.Random(4)
    checks_per_law = 10_000
    counts = {}
    for law, check in LAWS.items():
        done = fails = 0
        k = 0
        while done < checks_per_law:
            p, m, d = params[k % len(params)]
            k += 1
            G = random_group(p, m, d, rng)
            for _ in range(50):
                done += 1
                fails += not check(G, rng)
        counts[law] = (done, fails)
    ok = all(f == 0 for _, f in counts.values())
    detail = "; ".join(f"{law} {n} checks/{f} failures" for law, (n, f) in counts.items())
    report_line(4, ok, f"{len(params)} (p,m,d) settings; {detail}")
    assert ok


def _triple_checks(p, m, d, count, rng):
    bad = 0
    for _ in range(count):
        G = random_group(p, m, d, rng)
        H = random_hidden_subgroup(G, rng.choice([1, p]), rng)
        oracle = CosetOracle(G, hiding_function(G, H))
        t = make_appropriate_triple(G, oracle, rng)
        gens = list(H) + [G.z(k) for k in range(d)]
        hidden = sorted(closure(G, H))
        ok = (hiding_set_holds(G, t, gens, closure(G, gens))
              and all(eigenvalue_identities_hold(G, b, u, hidden) for b, u in zip(t.bases, t.u_list)))
        bad += not ok
    return bad


def test_criterion_5_hiding_sets(report_line):
    rng = random.Random(5)
    bad_small = _triple_checks(3, 2, 1, 100, rng)
    bad_large = _triple_checks(5, 3, 2, 20, rng)
    ok = bad_small == 0 and bad_large == 0
    report_line(5, ok, f"(3,2,1): 100 triples, {bad_small} failures; "
                       f"(5,3,2): 20 triples, {bad_large} failures")
    assert ok


def test_criterion_6_fourier_law(report_line):
    rng = random.Random(6)
    settings = [(3, 2, 1)] * 20 + [(3, 3, 2)] * 20 + [(5, 3, 2)] * 10
    bad = 0
    for p, m, d in settings:
        G = random_group(p, m, d, rng)
        H = random_hidden_subgroup(G, rng.choice([1, p]), rng)
        oracle = CosetOracle(G, hiding_function(G, H))
        t = make_appropriate_triple(G, oracle, rng)
        gens = list(H) + [G.z(k) for k in range(d)]
        hgp = closure(G, gens)
        assert hiding_set_holds(G, t, gens, hgp)
        dist = fourier_sample_distribution(p, m, lambda eb: hiding_state(G, t, G.lift(eb)))
        # brute force: K = bar(HG'), then its annihilator
        bars = list(itertools.product(range(p), repeat=m))
        K = [eb for eb in bars if G.lift(eb) in hgp]
        perp = {y for y in bars if all(sum(a * b for a, b in zip(y, k)) % p == 0 for k in K)}
        want = {y: (Fraction(1, len(perp)) if y in perp else Fraction(0)) for y in bars}
        bad += dist.outcomes != want
    ok = bad == 0
    report_line(6, ok, f"{len(settings)} instances, exact law equals uniform on K-perp in "
                       f"{len(settings) - bad}")
    assert ok


def test_criterion_7_end_to_end(report_line):
    rng = random.Random(7)
    lines = []
    ok = True
    for (p, m, d), trials in [((3, 2, 1), 200), ((3, 3, 2), 100), ((5, 3, 2), 50)]:
        mism = 0
        attempts = []
        slowest = 0.0
        for _ in range(trials):
            G = random_group(p, m, d, rng)
            f = hiding_function(G, random_hidden_subgroup(G, rng.choice([1, p]), rng))
            t0 = time.perf_counter()
            res = find_hidden_subgroup(G, f, rng)
            slowest = max(slowest, time.perf_counter() - t0)
            mism += res.subgroup != brute_force_hsp(G, f)
            attempts.append(res.attempts)
        retries = sum(a - 1 for a in attempts) / trials
        ok &= mism == 0 and retries <= 1.5 and slowest < 10
        lines.append(f"({p},{m},{d}) {trials - mism}/{trials} match, mean retries {retries:.2f}, "
                     f"slowest {slowest:.2f} s")
    report_line(7, ok, "; ".join(lines))
    assert ok


def test_criterion_8_reduction_suite(report_line):
    H3 = red.from_nil2(heisenberg(3))
    C = red.cyclic_group
    s1 = {q: len(S) for q, S in red.sylow_decompose(red.direct_product(H3, C(5))).items()}
    s2 = {q: len(S) for q, S in red.sylow_decompose(red.direct_product(H3, C(25))).items()}
    sylow_ok = s1 == {3: 27, 5: 5} and s2 == {3: 27, 5: 25}

    rng = random.Random(8)
    cat = p_group_catalogue(rng)
    wrong = over = 0
    worst = 0.0
    for _ in range(50):
        _, G = rng.choice(cat)
        H = random_subgroup(G, rng)
        res = red.algorithm1(G, coset_label_function(G, H), red.brute_force_subsolver)
        bound = 4 * math.log(G.order, 3) ** 2
        wrong += res.subgroup != H
        over += res.calls > bound
        worst = max(worst, res.calls / bound)

    M = red.modular_group(3)
    star = red.exponent_p_subgroup(M, 3)
    star_ok = len(star) == 9 and M.is_subgroup(star) and red.hall_coset_property(M, star, 3)
    ok = sylow_ok and wrong == 0 and over == 0 and star_ok
    report_line(8, ok, f"Sylow orders {s1}, {s2}; algorithm1 50 instances, {wrong} wrong, "
                       f"{over} over the call bound (max calls/bound {worst:.2f}); "
                       f"modular group G* order {len(star)}, Hall property {star_ok}")
    assert ok


def test_criterion_9_scaling(report_line):
    rep = bench_report("quick", seed=9)
    slope = rep["loglog_slope"]
    ok = slope < 6
    report_line(9, ok, f"log-log slope of solver time over d=1..8 at p=101: {slope:.2f} (limit 6)")
    assert ok


if __name__ == "__main__":
    import sys

    def emit(number, ok, detail):
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn(emit)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
