from __future__ import annotations

import json
import random

import jsonschema
import pytest

from nil2hsp import cli, reduction as red
from nil2hsp.nil2 import heisenberg, parse_group
from nil2hsp.quadsys import QuadLinSystem, check_solution, format_system, full_size


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_group(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    assert run(capsys, "gen-group", "--p", 3, "--m", 2, "--d", 1, "--seed", 7, "--out", a)[0] == 0
    assert run(capsys, "gen-group", "--p", 3, "--m", 2, "--d", 1, "--seed", 7, "--out", b)[0] == 0
    assert a.read_text() == b.read_text()
    G = parse_group(a.read_text())
    assert (G.p, G.m, G.d) == (3, 2, 1) and G.c[(0, 1)] in {(1,), (2,)}


@pytest.mark.parametrize("args", [("--p", 3, "--m", 2, "--d", 2), ("--p", 4, "--m", 2, "--d", 1),
                                  ("--p", 3, "--m", 2)])
def test_gen_group_bad_input(args, capsys):
    assert run(capsys, "gen-group", *args)[0] == 2


def test_solve_quadsys(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("3 1 6\n1 1 1 1 1 1\n")
    code, out, _ = run(capsys, "solve-quadsys", "--in", f, "--verify")
    lines = out.split("\n")
    j = [int(x) for x in lines[0].split()]
    assert code == 0 and lines[1] == "OK"
    assert check_solution([[1] * 6], j, 3)


def test_solve_quadsys_random_files(tmp_path, capsys):
    rng = random.Random(4)
    for p in (7, 101, 9973):
        d = rng.randrange(1, 4)
        n = full_size(d)
        sys_ = QuadLinSystem(p, d, n, tuple(tuple(rng.randrange(p) for _ in range(n)) for _ in range(d)))
        f = tmp_path / f"s{p}.txt"
        f.write_text(format_system(sys_))
        code, out, _ = run(capsys, "solve-quadsys", "--in", f, "--verify", "--seed", p)
        assert code == 0 and out.split("\n")[1] == "OK"


@pytest.mark.parametrize("text,code", [("3 1 5\n1 1 1 1 1\n", 3), ("3 1 6\n1 1 1\n", 2),
                                       ("garbage\n", 2), ("6 1 6\n1 1 1 1 1 1\n", 2)])
def test_solve_quadsys_errors(tmp_path, capsys, text, code):
    f = tmp_path / "s.txt"
    f.write_text(text)
    assert run(capsys, "solve-quadsys", "--in", f)[0] == code


def test_solve_quadsys_missing_file(tmp_path, capsys):
    assert run(capsys, "solve-quadsys", "--in", tmp_path / "nope.txt")[0] == 2


def test_run_hsp_order_p(capsys):
    code, out, _ = run(capsys, "run-hsp", "--p", 3, "--m", 2, "--d", 1, "--order", "p",
                       "--trials", 50, "--json")
    report = json.loads(out)
    jsonschema.validate(report, cli.HSP_REPORT_SCHEMA)
    assert code == 0
    assert report["aggregate"]["matches"] == 50
    assert all(len(t["recovered"]) == 3 for t in report["trials"])


def test_run_hsp_order_one(capsys):
    code, out, _ = run(capsys, "run-hsp", "--p", 3, "--m", 3, "--d", 2, "--order", 1,
                       "--trials", 5, "--json")
    report = json.loads(out)
    assert code == 0
    assert all(len(t["recovered"]) == 1 for t in report["trials"])


def test_run_hsp_deterministic_and_parallel(tmp_path, capsys):
    paths = [tmp_path / f"r{i}.json" for i in range(3)]
    base = ["run-hsp", "--p", 3, "--m", 2, "--d", 1, "--trials", 6, "--seed", 99]
    run(capsys, *base, "--json", paths[0])
    run(capsys, *base, "--json", paths[1])
    run(capsys, *base, "--jobs", 2, "--json", paths[2])
    texts = [p.read_bytes() for p in paths]
    assert texts[0] == texts[1] == texts[2]
    other = tmp_path / "o.json"
    run(capsys, *base[:-1], 100, "--json", other)
    assert other.read_bytes() != texts[0]


def test_run_hsp_group_file_and_timings(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("3 2 1\n1 2 1\n")
    code, out, _ = run(capsys, "run-hsp", "--group-file", g, "--trials", 3, "--timings", "--json")
    report = json.loads(out)
    jsonschema.validate(report, cli.HSP_REPORT_SCHEMA)
    assert code == 0 and all("wall_time_s" in t for t in report["trials"])


@pytest.mark.parametrize("args", [("--p", 3, "--m", 2), ("--p", 3, "--m", 2, "--d", 1, "--order", 9),
                                  ("--group-file", "/nonexistent")])
def test_run_hsp_bad_input(args, capsys):
    assert run(capsys, "run-hsp", *args)[0] == 2


def test_aggregate_consistent_with_records():
    report = cli.run_hsp_report(seed=5, trials=8, order="random", p=3, m=2, d=1)
    recs = report["trials"]
    agg = report["aggregate"]
    assert agg["matches"] == sum(r["match"] for r in recs)
    assert agg["matches"] + agg["failures"] == len(recs)
    assert agg["mean_attempts"] == sum(r["attempts"] for r in recs) / len(recs)


def test_run_reduction(tmp_path, capsys):
    H = red.from_nil2(heisenberg(3))
    G = red.direct_product(H, red.cyclic_group(5))
    f = tmp_path / "t.txt"
    f.write_text(red.format_table(G, [1, 5]))
    for solver in ("brute", "qsim"):
        code, out, _ = run(capsys, "run-reduction", "--table-file", f, "--solver", solver, "--json")
        report = json.loads(out)
        jsonschema.validate(report, cli.REDUCTION_REPORT_SCHEMA)
        assert code == 0 and report["match"]
        assert {q: v["order"] for q, v in report["sylow"].items()} == {"3": 27, "5": 5}
        assert report["exponent_p_subgroups"]["3"]["order"] == 27


def test_run_reduction_modular_group(tmp_path, capsys):
    f = tmp_path / "m.txt"
    f.write_text(red.format_table(red.modular_group(3)))
    code, out, _ = run(capsys, "run-reduction", "--table-file", f, "--json")
    report = json.loads(out)
    assert code == 0 and report["exponent_p_subgroups"]["3"]["order"] == 9


def test_run_reduction_bad_table(tmp_path, capsys):
    f = tmp_path / "t.txt"
    f.write_text("2\n0 1\n0 1\n")
    assert run(capsys, "run-reduction", "--table-file", f)[0] == 2


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--json")
    report = json.loads(out)
    jsonschema.validate(report, cli.BENCH_REPORT_SCHEMA)
    assert code == 0 and [r["d"] for r in report["by_d"]] == list(range(1, 9))


def test_unknown_subcommand(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_derive_seed_is_stable():
    assert cli.derive_seed(1, "a", 2) == cli.derive_seed(1, "a", 2)
    assert cli.derive_seed(1, "a", 2) != cli.derive_seed(1, "a", 3)
