import json
from decimal import Decimal

import pytest
from click.testing import CliRunner

from zexpansion.cli import main
from zexpansion.numerics import PrecisionConfig, from_fraction
from oracles import exact_low_order


@pytest.fixture
def runner():
    return CliRunner()


def coefficient_lines(text):
    return [line.split() for line in text.splitlines() if line and not line.startswith("#")]


def test_order_zero_is_usage_error(runner):
    r = runner.invoke(main, ["compute-coeffs", "--order", "0"])
    assert r.exit_code == 2


def test_digits_below_floor(runner):
    r = runner.invoke(main, ["sum-energy", "--input", "bundled:tableI.coeff", "--digits", "20"])
    assert r.exit_code == 2


def test_missing_input_names_path(runner):
    r = runner.invoke(main, ["sum-energy", "--input", "no/such/file.coeff"])
    assert r.exit_code == 2
    assert "no/such/file.coeff" in r.stderr


def test_malformed_input_is_input_error(runner, tmp_path):
    bad = tmp_path / "bad.coeff"
    bad.write_text("0 -1\n2 0.1\n")
    r = runner.invoke(main, ["sum-energy", "--input", str(bad)])
    assert r.exit_code == 2
    assert "missing n=1" in r.stderr


def test_bad_charge_list(runner):
    r = runner.invoke(main, ["sum-energy", "--input", "bundled:tableI.coeff", "--z", "0"])
    assert r.exit_code == 2


def test_three_term_file_matches_oracle(runner, tmp_path, sympy_omega1):
    out = tmp_path / "o1.coeff"
    r = runner.invoke(main, ["compute-coeffs", "--omega", "1", "--order", "3", "--single-shell", "-o", str(out)])
    assert r.exit_code == 0, r.output
    assert "stable digits" in r.stdout
    rows = coefficient_lines(out.read_text())
    exact = exact_low_order(*sympy_omega1)
    cfg = PrecisionConfig(40)
    for (_, text), q in zip(rows, exact):
        ref = from_fraction(q, cfg)
        assert abs(Decimal(text) - ref) <= abs(ref) * Decimal("1e-30")


def test_compute_default_basis(runner, tmp_path):
    out = tmp_path / "o8.coeff"
    r = runner.invoke(main, ["compute-coeffs", "--omega", "8", "--order", "6", "--digits", "40", "-o", str(out)])
    assert r.exit_code == 0, r.output
    text = out.read_text()
    assert "# digits: 40" in text and "# omega: 8" in text
    e2 = dict(coefficient_lines(text))["2"]
    assert e2.startswith("-0.15766642")


def test_degenerate_basis_exit_one(runner, monkeypatch):
    from zexpansion import cli
    from zexpansion.perturbation import BasisDegeneracyError

    def boom(*args, **kwargs):
        raise BasisDegeneracyError("restricted system is not positive definite")
    monkeypatch.setattr(cli, "run_recursion", boom)
    r = runner.invoke(main, ["compute-coeffs", "--omega", "0", "--order", "2"])
    assert r.exit_code == 1
    assert "not positive definite" in r.stderr


def test_dump_matrices(runner, tmp_path):
    dump = tmp_path / "m.txt"
    r = runner.invoke(main, ["compute-coeffs", "--omega", "1", "--order", "1", "--single-shell",
                             "--no-check-digits", "--dump-matrices", str(dump)])
    assert r.exit_code == 0
    text = dump.read_text()
    assert "[S]" in text and "[H0]" in text and "[V]" in text
    assert "# digits: 40" in text


def test_sum_energy_table(runner):
    r = runner.invoke(main, ["sum-energy", "--input", "tableI.coeff", "--z", "1..12", "--digits", "40",
                             "--format", "json"])
    assert r.exit_code == 0
    doc = json.loads(r.stdout)
    assert doc["config"]["digits"] == 40
    reference = {row.split()[0]: Decimal(row.split()[1]) for row in
                 (CliRunner().invoke(main, ["sum-energy", "--input", "tableI.coeff"]).stdout.splitlines())
                 if row and row[0] != "#" and row.split()[0].isdigit()}
    assert len(doc["rows"]) == 12 and len(reference) == 12
    from zexpansion.reference import parse_reference_file
    perturbative = {str(row.Z): Decimal(row.energy) for row in parse_reference_file("bundled:tableII_perturbative.refs")}
    for row in doc["rows"]:
        diff = abs(Decimal(row["energy"]) - perturbative[row["Z"]])
        assert diff <= Decimal(row["tail_bound"])


def test_sum_energy_helium_prefix(runner):
    r = runner.invoke(main, ["sum-energy", "--input", "tableI.coeff", "--z", "2", "--format", "csv"])
    assert r.exit_code == 0
    row = [line for line in r.stdout.splitlines() if line.startswith("2,")][0]
    assert row.split(",")[1].startswith("-2.9037243770341")


def test_env_precision_is_echoed(runner):
    r = runner.invoke(main, ["sum-energy", "--input", "tableI.coeff", "--z", "3"], env={"ZEXPANSION_DIGITS": "55"})
    assert r.exit_code == 0
    assert "# digits: 55" in r.stdout


def test_analyze_geometric(runner):
    r = runner.invoke(main, ["analyze-series", "--input", "synthetic_geometric.coeff", "--method", "ratio",
                             "--window", "5:20", "--format", "json"])
    assert r.exit_code == 0
    (row,) = json.loads(r.stdout)["rows"]
    assert Decimal(row["lambda_star"]) == 2 and Decimal(row["residual"]) == 0


def test_analyze_bad_window(runner):
    r = runner.invoke(main, ["analyze-series", "--input", "tableI.coeff", "--window", "5-20"])
    assert r.exit_code == 2
    r = runner.invoke(main, ["analyze-series", "--input", "tableI.coeff", "--window", "5:40"])
    assert r.exit_code == 1


def test_compare_reports_twelve_digits(runner):
    r = runner.invoke(main, ["compare", "--coeffs", "tableI.coeff", "--refs", "tableII.refs", "--format", "json"])
    assert r.exit_code == 0
    rows = json.loads(r.stdout)["rows"]
    assert [x["matching_decimal_digits"] >= 12 for x in rows if x["Z"] <= 10] == [True] * 10


def test_compare_require(runner):
    r = runner.invoke(main, ["compare", "--coeffs", "tableI.coeff", "--refs", "tableII.refs", "--require", "8"])
    assert r.exit_code == 1
    assert "Z = [1, 2, 3]" in r.stderr
    r = runner.invoke(main, ["compare", "--coeffs", "tableI.coeff", "--refs", "tableII.refs", "--require", "3"])
    assert r.exit_code == 0


def test_check_integrals_small(runner):
    r = runner.invoke(main, ["check-integrals", "--max-power", "1", "--format", "csv"])
    assert r.exit_code == 0, r.output
    assert "FAIL" not in r.stdout
    assert "all checks passed" in r.stderr


def test_outputs_are_deterministic(runner, tmp_path):
    out = tmp_path / "report.txt"
    seen = []
    for _ in range(2):
        r = runner.invoke(main, ["compare", "--coeffs", "tableI.coeff", "--refs", "tableII.refs", "-o", str(out)])
        assert r.exit_code == 0
        seen.append(out.read_bytes())
    assert seen[0] == seen[1]
    # atomic write leaves no temporary files behind
    assert [x.name for x in tmp_path.iterdir()] == ["report.txt"]
