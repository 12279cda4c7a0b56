import io
import json
import subprocess
import sys

import pytest

from conftest import S1_GRID, S2_GRID, S3_GRID
from markov_kernels import checks, cli
from markov_kernels.density import printed_pair_cond_exp
from markov_kernels.diagnosis import PAPER_TABLES, classify, cond_exp_closed_forms, parse_table, parse_table_text
from markov_kernels.serialize import parse_rational


def run(argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(argv, out)
    return code, out.getvalue()


def text_of(grid):
    return "\n".join(" ".join(map(str, row)) for row in grid) + "\n"


@pytest.fixture
def table_file(tmp_path):
    def write(grid, name="t.txt"):
        path = tmp_path / name
        path.write_text(text_of(grid))
        return str(path)
    return write


# -- analyze --------------------------------------------------------------------

def test_analyze_s1_file(table_file):
    code, out = run(["--format", "structured", "analyze", table_file(S1_GRID)])
    doc = json.loads(out)
    assert code == 0
    assert doc["independent"] is True and doc["equal"] is True
    assert doc["category"] == "both_hold"


def test_analyze_s3_all_routes_agree(table_file):
    code, out = run(["analyze", table_file(S3_GRID), "--format", "structured"])
    doc = json.loads(out)
    assert code == 0
    assert doc["category"] == "equality_without_independence"
    assert all(doc["route_checks"].values())


def test_analyze_reads_stdin_and_json(monkeypatch):
    code, out = run(["analyze", "-"], stdin=text_of(S2_GRID), monkeypatch=monkeypatch)
    assert code == 0 and "both_fail" in out
    payload = json.dumps({"counts": S2_GRID[0] + S2_GRID[1]})
    code, out = run(["analyze", "-"], stdin=payload, monkeypatch=monkeypatch)
    assert code == 0 and "both_fail" in out


def test_analyze_inline_counts():
    code, out = run(["analyze", "--counts", *map(str, S1_GRID[0] + S1_GRID[1])])
    assert code == 0 and "both_hold" in out


def test_fifteen_entries_is_a_parse_error(table_file, capsys):
    bad = (S1_GRID[0], S1_GRID[1][:7])
    code, _ = run(["analyze", table_file(bad)])
    assert code == cli.EXIT_USAGE
    assert "line 2" in capsys.readouterr().err


def test_fifteen_json_counts_is_a_parse_error(monkeypatch):
    code, _ = run(["analyze", "-"], stdin=json.dumps({"counts": [1] * 15}), monkeypatch=monkeypatch)
    assert code == cli.EXIT_USAGE


def test_zero_disease_margin_is_a_validation_error(table_file, capsys):
    top = [1, 0, 1, 0, 1, 0, 1, 0]
    code, _ = run(["analyze", table_file((top, top))])
    assert code == cli.EXIT_VALIDATION
    assert "n_++1+" in capsys.readouterr().err


def test_missing_input_and_missing_file():
    assert run(["analyze"])[0] == cli.EXIT_USAGE
    assert run(["analyze", "/nonexistent/table.txt"])[0] == cli.EXIT_USAGE


def test_output_flag_writes_structured_document(table_file, tmp_path):
    dest = tmp_path / "report.json"
    code, out = run(["analyze", table_file(S1_GRID), "--output", str(dest)])
    assert code == 0 and out.startswith("S-table")
    assert json.loads(dest.read_text())["category"] == "both_hold"


def test_structured_rationals_round_trip(table_file):
    _, out = run(["--format", "structured", "analyze", table_file(S2_GRID)])
    doc = json.loads(out)
    forms = cond_exp_closed_forms(PAPER_TABLES["S2"])
    for key, entry in doc["e_m_given_m1m2"].items():
        i, j = map(int, key.split(","))
        assert parse_rational(entry["value"]) == forms.e_m_given_m1m2[i, j]
    t = parse_table(doc["table"])
    assert t == PAPER_TABLES["S2"]
    assert classify(t).value == doc["category"]


# -- verify-paper -----------------------------------------------------------------

def test_verify_paper_passes():
    code, out = run(["verify-paper"])
    assert code == 0
    assert out.count("PASS") == 3
    assert "E(M|M1xM2)(1,1) = 30437/61047" in out


def test_verify_paper_flags_a_corrupted_table(monkeypatch):
    monkeypatch.setitem(PAPER_TABLES, "S2", parse_table(list(S1_GRID)))
    code, out = run(["verify-paper"])
    assert code == cli.EXIT_INCONSISTENT
    assert "FAIL S2: expected both_fail, observed both_hold" in out


def test_verify_paper_structured():
    code, out = run(["verify-paper", "--format", "structured"])
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    assert [t["name"] for t in doc["tables"]] == ["S1", "S2", "S3"]


# -- search ---------------------------------------------------------------------

def test_search_witness_round_trips():
    code, out = run(["search", "--category", "both_hold", "--seed", "1", "--budget", "100000"])
    assert code == 0
    lines = out.splitlines()
    table = parse_table_text("\n".join(lines[1:3]))
    assert classify(table).value == "both_hold"
    code, again = run(["--format", "structured", "search", "--category", "both_hold",
                       "--seed", "1", "--budget", "100000"])
    assert parse_table(json.loads(again)["table"]) == table


def test_search_exhaustion_has_its_own_exit_code():
    code, out = run(["search", "--category", "independence_without_equality",
                     "--seed", "3", "--budget", "500"])
    assert code == cli.EXIT_EXHAUSTED
    assert "exhausted" in out


def test_search_is_byte_identical():
    argv = ["--format", "structured", "search", "--category", "equality_without_independence",
            "--seed", "17", "--budget", "20000"]
    assert run(argv) == run(argv)


@pytest.mark.parametrize("argv", [
    ["search", "--category", "nope", "--seed", "1", "--budget", "5"],
    ["search", "--category", "both_hold", "--seed", "-1", "--budget", "5"],
    ["search", "--category", "both_hold", "--seed", "1", "--budget", "0"],
    ["crosscheck", "--seed", "1", "--iters", "0"],
    [],
    ["frobnicate"],
])
def test_usage_errors(argv):
    assert run(argv)[0] == cli.EXIT_USAGE


# -- crosscheck -------------------------------------------------------------------

def test_crosscheck_clean_run():
    code, out = run(["--format", "structured", "crosscheck", "--seed", "5", "--iters", "20"])
    doc = json.loads(out)
    assert code == 0
    assert doc["total_failed"] == 0 and doc["failures"] == []
    assert doc["checks"]["tower"]["checked"] == 20


def test_crosscheck_is_byte_identical():
    argv = ["--format", "structured", "crosscheck", "--seed", "12", "--iters", "15"]
    assert run(argv) == run(argv)


def test_crosscheck_catches_an_injected_bug(monkeypatch):
    # swap the pair normaliser for f1*f2
    original = checks.cond_exp_via_density

    def broken(j, given="x1"):
        return original(j, given) if given == "x1" else printed_pair_cond_exp(j)

    monkeypatch.setattr(checks, "cond_exp_via_density", broken)
    code, out = run(["--format", "structured", "crosscheck", "--seed", "5", "--iters", "10"])
    doc = json.loads(out)
    assert code == cli.EXIT_INCONSISTENT
    assert doc["checks"]["density_cond_exp_pair"]["failed"] > 0
    bundle = doc["failures"][0]
    assert bundle["seed"] == 5
    assert "density_cond_exp_pair" in bundle["failed_checks"]
    assert bundle["instance"]


def test_module_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "markov_kernels", "verify-paper"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "all tables match" in proc.stdout
