"""Command-line front end.

Exit codes: 0 success, 1 mismatch or failure, 2 input error, 3 solver
precondition error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import random
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import reduction
from .nil2 import (GroupFormatError, GroupSpec, brute_force_hsp, format_group, hiding_function,
                   parse_group, random_group, random_hidden_subgroup)
from .qsim import HSPFailure, find_hidden_subgroup
from .quadsys import (PreconditionError, QuadLinSystem, SystemFormatError, check_solution,
                      full_size, parse_system, solve_full_system)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3

_ELEMENT = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}},
            "minItems": 2, "maxItems": 2}

HSP_REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "config", "trials", "aggregate"],
    "properties": {
        "command": {"const": "run-hsp"},
        "config": {"type": "object", "required": ["seed", "trials", "order"]},
        "trials": {"type": "array", "items": {
            "type": "object",
            "required": ["trial", "seed", "group", "hidden_generators", "recovered",
                         "oracle", "match", "attempts", "samples"],
            "properties": {
                "trial": {"type": "integer"},
                "seed": {"type": "integer"},
                "group": {"type": "object", "required": ["p", "m", "d", "c"]},
                "hidden_generators": {"type": "array", "items": _ELEMENT},
                "recovered": {"type": ["array", "null"], "items": _ELEMENT},
                "oracle": {"type": "array", "items": _ELEMENT},
                "match": {"type": "boolean"},
                "attempts": {"type": "integer", "minimum": 1},
                "samples": {"type": "integer", "minimum": 0},
                "error": {"type": "string"},
                "wall_time_s": {"type": "number"},
            },
        }},
        "aggregate": {"type": "object",
                      "required": ["trials", "matches", "failures", "mean_attempts",
                                   "mean_retries", "max_attempts"]},
    },
}

REDUCTION_REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "order", "hidden_generators", "sylow", "recovered", "oracle",
                 "match", "exponent_p_subgroups"],
    "properties": {
        "command": {"const": "run-reduction"},
        "order": {"type": "integer"},
        "hidden_generators": {"type": "array", "items": {"type": "integer"}},
        "sylow": {"type": "object"},
        "recovered": {"type": "array", "items": {"type": "integer"}},
        "oracle": {"type": "array", "items": {"type": "integer"}},
        "match": {"type": "boolean"},
        "exponent_p_subgroups": {"type": "object"},
    },
}

BENCH_REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "suite", "by_d", "by_p", "loglog_slope"],
    "properties": {
        "command": {"const": "bench"},
        "by_d": {"type": "array", "items": {"type": "object", "required": ["d", "p", "n", "seconds"]}},
        "by_p": {"type": "array", "items": {"type": "object", "required": ["d", "p", "n", "seconds"]}},
        "loglog_slope": {"type": "number"},
    },
}


def derive_seed(seed: int, *path) -> int:
    """Counter-style seed derivation: independent of scheduling order."""
    h = hashlib.blake2b(repr((seed,) + path).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def _elem_json(g) -> list[list[int]]:
    return [list(g.e), list(g.f)]


def _group_json(G: GroupSpec) -> dict:
    return {"p": G.p, "m": G.m, "d": G.d,
            "c": [[i + 1, j + 1, list(v)] for (i, j), v in sorted(G.c.items())]}


def _emit(doc: dict, target: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if target in (None, "-"):
        print(text)
    else:
        Path(target).write_text(text + "\n")


# -- gen-group ----------------------------------------------------------------

def cmd_gen_group(args) -> int:
    try:
        G = random_group(args.p, args.m, args.d, random.Random(derive_seed(args.seed, "gen-group")))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = format_group(G)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- solve-quadsys ------------------------------------------------------------

def cmd_solve_quadsys(args) -> int:
    try:
        sys_ = parse_system(Path(args.infile).read_text())
    except (OSError, SystemFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        j = solve_full_system(sys_, random.Random(derive_seed(args.seed, "solve-quadsys")))
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    print(" ".join(map(str, j)))
    if args.verify:
        ok = check_solution(sys_.U, j, sys_.p)
        print("OK" if ok else "FAILED")
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


# -- run-hsp ------------------------------------------------------------------

def _hsp_trial(job: tuple) -> dict:
    index, seed, group_text, p, m, d, order, max_retries, timings = job
    tseed = derive_seed(seed, "run-hsp", index)
    rng = random.Random(tseed)
    G = parse_group(group_text) if group_text else random_group(p, m, d, rng)
    if order == "random":
        o = rng.choice([1, G.p])
    else:
        o = G.p if order == "p" else int(order)
    hgens = random_hidden_subgroup(G, o, rng)
    f = hiding_function(G, hgens)
    oracle = sorted(brute_force_hsp(G, f))
    rec = {"trial": index, "seed": tseed, "group": _group_json(G),
           "hidden_generators": [_elem_json(h) for h in hgens],
           "oracle": [_elem_json(g) for g in oracle]}
    t0 = time.perf_counter()
    try:
        res = find_hidden_subgroup(G, f, rng, max_retries=max_retries)
    except HSPFailure as exc:
        rec.update(recovered=None, match=False, attempts=len(exc.attempts),
                   samples=sum(a.get("samples", 0) for a in exc.attempts), error=str(exc))
    else:
        rec.update(recovered=[_elem_json(g) for g in sorted(res.subgroup)],
                   match=sorted(res.subgroup) == oracle, attempts=res.attempts,
                   samples=res.samples)
    if timings:
        rec["wall_time_s"] = time.perf_counter() - t0
    return rec


def run_hsp_report(seed: int, trials: int, order: str, p: int | None = None, m: int | None = None,
                   d: int | None = None, group_text: str | None = None, jobs: int = 1,
                   max_retries: int = 10, timings: bool = False) -> dict:
    work = [(i, seed, group_text, p, m, d, order, max_retries, timings) for i in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            records = list(ex.map(_hsp_trial, work))
    else:
        records = [_hsp_trial(w) for w in work]
    attempts = [r["attempts"] for r in records]
    agg = {
        "trials": trials,
        "matches": sum(r["match"] for r in records),
        "failures": sum(not r["match"] for r in records),
        "mean_attempts": sum(attempts) / trials if trials else 0.0,
        "mean_retries": sum(a - 1 for a in attempts) / trials if trials else 0.0,
        "max_attempts": max(attempts, default=0),
    }
    config = {"seed": seed, "trials": trials, "order": order, "p": p, "m": m, "d": d,
              "group_file": group_text is not None, "max_retries": max_retries}
    return {"command": "run-hsp", "config": config, "trials": records, "aggregate": agg}


def cmd_run_hsp(args) -> int:
    group_text = None
    if args.group_file:
        try:
            group_text = Path(args.group_file).read_text()
            parse_group(group_text)
        except (OSError, GroupFormatError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        if None in (args.p, args.m, args.d):
            print("error: give --group-file or all of --p --m --d", file=sys.stderr)
            return EXIT_INPUT
        try:
            random_group(args.p, args.m, args.d, random.Random(0))
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    if args.order not in ("1", "p", "random"):
        print("error: --order must be 1, p or random", file=sys.stderr)
        return EXIT_INPUT
    report = run_hsp_report(args.seed, args.trials, args.order, args.p, args.m, args.d,
                            group_text, args.jobs, args.max_retries, args.timings)
    agg = report["aggregate"]
    if args.json is not None:
        _emit(report, args.json)
    else:
        print(f"{agg['matches']}/{agg['trials']} trials match; "
              f"mean attempts {agg['mean_attempts']:.3f}")
    return EXIT_OK if agg["failures"] == 0 else EXIT_FAIL


# -- run-reduction ------------------------------------------------------------

def _qsim_inner(seed: int):
    rng = random.Random(derive_seed(seed, "run-reduction", "qsim"))

    def P(K, fK):
        if K.order == 1:
            return frozenset([K.identity])
        p = min(reduction._factor(K.order))
        pres, to_elem = reduction.nil2_presentation(K, p)
        back = {g: i for i, g in enumerate(to_elem)}
        res = find_hidden_subgroup(pres, lambda g: fK(back[g]), rng)
        return frozenset(back[g] for g in res.subgroup)

    return P


def run_reduction_report(G: reduction.ExplicitGroup, hidden: list[int], seed: int,
                         solver: str = "brute") -> dict:
    H = G.closure(hidden)
    f = lambda g: min(G.mul(g, h) for h in H)
    inner = reduction.brute_force_subsolver if solver == "brute" else _qsim_inner(seed)
    res = reduction.solve_nilpotent_hsp(G, f, inner)
    oracle = sorted(reduction.brute_force_subsolver(G, f))
    stars = {}
    for q, S in reduction.sylow_decompose(G).items():
        Gq, _ = reduction.subgroup_as_group(G, S)
        try:
            stars[str(q)] = {"order": len(reduction.exponent_p_subgroup(Gq, q))}
        except reduction.ReductionError as exc:
            stars[str(q)] = {"order": None, "error": str(exc)}
    return {
        "command": "run-reduction", "order": G.order, "seed": seed, "solver": solver,
        "hidden_generators": list(hidden),
        "sylow": {str(q): v for q, v in res["parts"].items()},
        "recovered": sorted(res["subgroup"]), "oracle": oracle,
        "match": sorted(res["subgroup"]) == oracle,
        "exponent_p_subgroups": stars,
    }


def cmd_run_reduction(args) -> int:
    try:
        G, hidden = reduction.parse_table(Path(args.table_file).read_text())
    except (OSError, reduction.TableFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if hidden is None:
        rng = random.Random(derive_seed(args.seed, "run-reduction", "hidden"))
        hidden = [rng.randrange(G.order)]
    try:
        report = run_reduction_report(G, hidden, args.seed, args.solver)
    except reduction.ReductionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.json is not None:
        _emit(report, args.json)
    else:
        print(f"|G| = {report['order']}, recovered |H| = {len(report['recovered'])}, "
              f"match = {report['match']}")
    return EXIT_OK if report["match"] else EXIT_FAIL


# -- bench --------------------------------------------------------------------

def _time_solver(p: int, d: int, reps: int, seed: int) -> float:
    rng = random.Random(derive_seed(seed, "bench", p, d))
    n = full_size(d)
    systems = [QuadLinSystem(p, d, n, tuple(tuple(rng.randrange(p) for _ in range(n))
                                            for _ in range(d))) for _ in range(reps)]
    t0 = time.perf_counter()
    for s in systems:
        solve_full_system(s, rng)
    return (time.perf_counter() - t0) / reps


def bench_report(suite: str = "quick", seed: int = 0) -> dict:
    reps = 5 if suite == "quick" else 50
    dmax = 8
    by_d = [{"d": d, "p": 101, "n": full_size(d), "seconds": _time_solver(101, d, reps, seed)}
            for d in range(1, dmax + 1)]
    primes = [3, 101, 10007, 2**31 - 1, 2**61 - 1]
    by_p = [{"d": 2, "p": p, "n": full_size(2), "seconds": _time_solver(p, 2, reps, seed)}
            for p in primes]
    xs = [math.log(r["d"]) for r in by_d]
    ys = [math.log(r["seconds"]) for r in by_d]
    slope = statistics.linear_regression(xs, ys).slope
    return {"command": "bench", "suite": suite, "reps": reps, "by_d": by_d, "by_p": by_p,
            "loglog_slope": slope}


def cmd_bench(args) -> int:
    report = bench_report(args.suite, args.seed)
    if args.json is not None:
        _emit(report, args.json)
    else:
        for r in report["by_d"]:
            print(f"d={r['d']:2d} n={r['n']:4d} p={r['p']}: {r['seconds'] * 1e3:8.3f} ms")
        for r in report["by_p"]:
            print(f"d=2 p={r['p']}: {r['seconds'] * 1e3:8.3f} ms")
        print(f"log-log slope in d: {report['loglog_slope']:.2f}")
    return EXIT_OK


# -- entry point ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nil2hsp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen-group", help="write a random nil-2 group of exponent p")
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_group)

    s = sub.add_parser("solve-quadsys", help="solve a quadratic + linear system file")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_solve_quadsys)

    h = sub.add_parser("run-hsp", help="end-to-end HSP trials checked against brute force")
    h.add_argument("--group-file")
    h.add_argument("--p", type=int)
    h.add_argument("--m", type=int)
    h.add_argument("--d", type=int)
    h.add_argument("--order", default="random", help="1, p or random")
    h.add_argument("--trials", type=int, default=10)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--jobs", type=int, default=1)
    h.add_argument("--max-retries", type=int, default=10)
    h.add_argument("--timings", action="store_true", help="add wall times (breaks byte-identical output)")
    h.add_argument("--json", nargs="?", const="-", help="write the JSON report (to stdout if no path)")
    h.set_defaults(func=cmd_run_hsp)

    r = sub.add_parser("run-reduction", help="Sylow split, normalizer iteration and G* on a table file")
    r.add_argument("--table-file", required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--solver", choices=["brute", "qsim"], default="brute")
    r.add_argument("--json", nargs="?", const="-")
    r.set_defaults(func=cmd_run_reduction)

    b = sub.add_parser("bench", help="time the quadratic-system solver")
    b.add_argument("--suite", choices=["quick", "full"], default="quick")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--json", nargs="?", const="-")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
