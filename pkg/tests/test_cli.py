import csv
import io
import json

import pytest

from cubicfl.cli import RunConfig, TableReport, emit_report, run_command
from cubicfl.matcher import MatchReport


def run_json(argv):
    code, out = run_command(argv)
    return code, json.loads(out)


def strip_timing(data):
    data = dict(data)
    data.pop("timing", None)
    return data


def test_fl_verify_2q_case():
    code, data = run_json(["fl-verify", "--p", "7", "--a", "1*p^1", "--b", "2*p^1"])
    assert code == 0
    case = data["cases"][0]
    assert case["pass"]
    assert case["I"] == {"N": 3, "terms": [[0, "14"]]}
    assert data["summary"] == {"failed": 0, "passed": 1, "total": 1}


def test_fl_verify_vanishing_case():
    code, data = run_json(["fl-verify", "--p", "7", "--a", "1*p^-1", "--b", "1"])
    assert code == 0 and data["summary"]["passed"] == 1


def test_bad_prime_is_usage_error():
    code, _ = run_command(["fl-verify", "--p", "4", "--a", "1", "--b", "1"])
    assert code == 2


def test_bad_element_is_usage_error():
    code, _ = run_command(["fl-verify", "--a", "x*y", "--b", "1"])
    assert code == 2


def test_induced_failure_exits_one():
    code, data = run_json(["fl-verify", "--a", "rho*p^2", "--b", "2*p^2", "--c-factor", "27"])
    assert code == 1
    assert data["summary"]["failed"] == 1
    names = [name for name, _ in data["cases"][0]["inputs"]]
    assert names == ["a", "b", "c", "d"]
    assert data["field"]["normalization"] in ("chi", "chi_bar")


def test_json_is_deterministic_modulo_timing():
    argv = ["fl-sweep", "--vals", "0,1", "--modes", "closed-closed,functional"]
    code1, out1 = run_command(argv)
    code2, out2 = run_command(argv)
    assert code1 == code2 == 0
    assert strip_timing(json.loads(out1)) == strip_timing(json.loads(out2))
    report = MatchReport.from_json(json.loads(out1))
    assert report.total == 4 * 36 * 2


def test_empty_sweep():
    code, data = run_json(["fl-sweep", "--vals", "1,0"])
    assert code == 0 and data["summary"]["total"] == 0


def test_csv_has_exact_and_complex_columns():
    code, out = run_command(["fl-degenerate", "--c", "3*p^-1", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4 + 6
    assert all(row["pass"] == "True" for row in rows)
    header = rows[0].keys()
    assert any("complex" in h for h in header) and any("exact" in h for h in header)


def test_degenerate_brute_mode():
    code, data = run_json(["fl-degenerate", "--c", "2*p^1", "--which", "2", "--mode", "brute"])
    assert code == 0 and data["summary"]["passed"] == 1


def test_sums_table_and_identity_check():
    code, data = run_json(["sums-table", "--vals", "-1,0", "--y-vals", "0,1"])
    assert code == 0 and data["rows"] and all(r["pass"] for r in data["rows"])
    code, data = run_json(["identity-check", "--samples", "5"])
    assert code == 0 and len(data["rows"]) == 20


def test_text_format():
    code, out = run_command(["fl-verify", "--a", "1", "--b", "1", "--format", "text", "--display", "float"])
    assert code == 0 and "PASS" in out


def test_orbit_commands():
    code, data = run_json(["orbit-classify", "--q", "7", "--xi", "0,1;0,0;2,0;0,0", "--oracle"])
    assert code == 0
    assert data["relevant"] == data["oracle"]
    code, data = run_json(["orbit-census", "--q", "7", "--samples", "100"])
    assert code == 0 and data["failures"] == []
    code, _ = run_command(["orbit-classify", "--q", "11", "--xi", "0,1;0,0;0,0;0,0"])
    assert code == 2


def test_output_file(tmp_path):
    target = tmp_path / "report.json"
    code, out = run_command(["fl-verify", "--a", "p", "--b", "p", "--output", str(target)])
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["summary"]["passed"] == 1


def test_env_budget_override(monkeypatch):
    monkeypatch.setenv("CUBICFL_BRUTE_BUDGET", "10")
    code, _ = run_command(["fl-verify", "--a", "p^2", "--b", "p^2", "--mode", "closed-brute"])
    assert code == 2


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(fmt="xml")
    with pytest.raises(ValueError):
        RunConfig(normalization="sideways")


def test_table_report_emission():
    report = TableReport("demo", [{"pass": True, "x": 1}], {"p": 7}, 1.0)
    data = json.loads(emit_report(report, "json"))
    assert data["summary"] == {"failed": 0, "passed": 1, "total": 1}
