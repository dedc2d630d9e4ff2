import csv
import io
import subprocess
import sys

import pytest

from rootident.cli import parse_grid, run_command, strip_timestamp


def table(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_bounds_two_error(tmp_path):
    out = tmp_path / "b.csv"
    assert run_command(["bounds", "--two-error", "--eps", "0.5", "--delta", "0.5",
                        "--lambda", "0.05", "--out", str(out)]) == 0
    (row,) = table(out)
    assert row["n_min"] == "4" and row["vacuous"] == "false"
    text = out.read_text()
    assert text.startswith("# rootident") and "# seed: 0" in text


def test_domain_error_exit_code(capsys):
    code = run_command(["bounds", "--two-error", "--eps", "1.1", "--delta", "0.5",
                        "--lambda", "0.1"])
    err = capsys.readouterr().err
    assert code == 2
    assert len(err.strip().splitlines()) == 1
    assert "invalid-argument" in err and "eps < 2*delta" in err


def test_usage_error_is_single_line(capsys):
    assert run_command(["bounds", "--eps", "0.5"]) == 2
    assert len(capsys.readouterr().err.strip().splitlines()) == 1


def test_curves_schema(tmp_path):
    out = tmp_path / "c.csv"
    assert run_command(["curves", "--lambda-grid", "0.05:0.45:0.05", "--eps-ratio", "0.5",
                        "--out", str(out)]) == 0
    rows = table(out)
    assert len(rows) == 9
    assert list(rows[0]) == ["lambda", "n_old_raw", "n_old_min", "n_new_raw", "n_new_min",
                             "n_reference", "vacuous_flags"]
    assert all(v != "" for r in rows for v in r.values())


def test_grid_parsing():
    assert parse_grid("0.05:0.45:0.05")[-1] == 0.45
    assert len(parse_grid("0.1:0.3:0.1")) == 3
    assert parse_grid("0.2,0.4") == [0.2, 0.4]
    assert parse_grid("") == []


def test_compare_and_eps1_zero(tmp_path):
    out = tmp_path / "cmp.csv"
    assert run_command(["bounds", "--compare", "--eps", "0.5", "--eps1", "0", "--eps2", "0.5",
                        "--delta", "0.5", "--lambda-grid", "0.2,0.45,0.5", "--out", str(out)]) == 0
    rows = table(out)
    assert rows[0]["flags"] == "new_undefined" and "crossover" in rows[2]["flags"]
    assert run_command(["bounds", "--eps1-zero", "--eps2", "0.5", "--delta", "0.5",
                        "--lambda", "0.3"]) == 2


def test_simulate_not_found_exit_code(capsys):
    code = run_command(["simulate", "--test", "two", "--eps", "0.5", "--delta", "0.5",
                        "--lambda", "0.001", "--find-n", "--search-cap", "2", "--trials", "500"])
    assert code == 3
    assert "not-found" in capsys.readouterr().err


def test_simulate_report(tmp_path):
    out = tmp_path / "s.csv"
    assert run_command(["simulate", "--test", "three", "--eps1", "0.25", "--eps2", "0.625",
                        "--delta", "0.5", "--n", "6", "--trials", "2000", "--grid-points", "2",
                        "--out", str(out)]) == 0
    rows = table(out)
    assert list(rows[0]) == ["region", "kappa", "n", "trials", "failures", "p_hat", "ci_lo",
                             "ci_hi", "budget_lambda", "pass"]
    assert {r["region"] for r in rows} == {"target", "reject", "ring"}


def test_verify_rows(tmp_path):
    out = tmp_path / "v.csv"
    assert run_command(["verify", "--eps1", "0.25", "--eps2", "0.625", "--delta", "0.5",
                        "--n", "6", "--trials", "5000", "--out", str(out)]) == 0
    rows = table(out)
    assert [r["label"] for r in rows] == ["NT1", "NT3", "NT3", "NT2", "J1N1", "J2N2", "J3N3"]
    assert all(r["holds"] == "true" for r in rows)


def test_rootfind_methods(tmp_path):
    out = tmp_path / "n.csv"
    assert run_command(["rootfind", "--method", "newton", "--f", "x**2 - 2", "--x1", "2",
                        "--out", str(out)]) == 0
    rows = table(out)
    assert float(rows[-1]["x"]) == pytest.approx(2**0.5)
    assert run_command(["rootfind", "--method", "newton", "--f", "x**2 + 1", "--x1", "0"]) == 3
    assert run_command(["rootfind", "--method", "bracket", "--f", "x**2 - 2", "--a", "1",
                        "--b", "2", "--out", str(out)]) == 0
    assert table(out)[0]["has_root"] == "true"
    assert run_command(["rootfind", "--method", "robbins-monro", "--kappa", "1", "--delta", "0.5",
                        "--steps", "200", "--out", str(out)]) == 0
    assert len(table(out)) == 201


def test_idcodes_histogram(tmp_path):
    out = tmp_path / "i.csv"
    assert run_command(["idcodes", "--m-prime", "3", "--m-colors", "2", "--exhaustive",
                        "--out", str(out)]) == 0
    rows = table(out)
    assert sum(int(r["pairs"]) for r in rows) == 28
    assert "max pairwise overlap: 0.6666666666666666" in out.read_text()


def test_io_failure_exit_code(tmp_path):
    bad = tmp_path / "missing" / "x.csv"
    assert run_command(["bounds", "--two-error", "--eps", "0.5", "--delta", "0.5",
                        "--lambda", "0.1", "--out", str(bad)]) == 4


def test_replay_round_trip(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_command(["simulate", "--eps", "0.5", "--delta", "0.5", "--n", "3",
                        "--trials", "3000", "--seed", "17", "--out", str(first)]) == 0
    assert run_command(["replay", str(first), "--workers", "2", "--out", str(second)]) == 0
    assert strip_timestamp(first.read_text()) == strip_timestamp(second.read_text())


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rootident", "bounds", "--two-error", "--eps",
                           "0.27", "--delta", "0.5", "--lambda", "0.2"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip().splitlines()[-1].split(",")[7] == "3"
