from __future__ import annotations

import json

import pytest

from cubicpair.cli import render, run

PAIR = '{"n": 3, "c": [1, 2, 3], "d": [1, 0, -1]}'


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv", [
    ["mgood", "--pair", PAIR],
    ["arrange", "--pair", PAIR],
    ["rho", "--pair", PAIR, "--p", "5", "--method", "both"],
    ["verify-lift", "--pair", PAIR, "--p", "5"],
    ["series", "--pair", PAIR, "--P0", "6"],
    ["search", "--pair", PAIR, "--bound", "4", "--support-size", "3"],
    ["prob", "--exact"],
    ["prob", "--mc", "--p", "5", "--condition", "II", "--trials", "2000"],
])
def test_json_round_trip(capsys, argv):
    code, out, _ = call(capsys, *argv)
    assert code == 0
    data = json.loads(out)
    assert json.loads(render(data, "json")) == data


def test_rho_both_agree(capsys):
    _, out, _ = call(capsys, "rho", "--pair", PAIR, "--p", "5", "--method", "both")
    assert json.loads(out)["agree"] is True


def test_prob_interval(capsys):
    code, out, _ = call(capsys, "prob", "--interval")
    assert code == 0
    assert json.loads(out)["interval_rounded"] == ["0.9694", "0.9700"]


def test_optimize(capsys):
    code, out, _ = call(capsys, "optimize")
    data = json.loads(out)
    assert code == 0 and data["delta_star"] == "566/34905" and data["optimal_exponent"] == "2327"
    assert data["certificate"] is True


def test_optimize_constraint_file(capsys, tmp_path):
    f = tmp_path / "cons.json"
    f.write_text(json.dumps([{"label": "a", "N": "1", "alpha": "0", "beta": "1"},
                             {"label": "b", "N": "1", "alpha": "1", "beta": "-1"}]))
    code, out, _ = call(capsys, "optimize", "--constraints", str(f))
    assert code == 0 and json.loads(out)["delta_star"] == "1/30"


def test_rho_over_cap_exit_1(capsys):
    big = json.dumps({"n": 12, "c": list(range(1, 13)), "d": [1] * 12})
    code, out, err = call(capsys, "rho", "--pair", big, "--p", "7", "--k", "2", "--method", "brute")
    assert code == 1 and "error" in json.loads(out) and err.startswith("error:")


def test_malformed_input_exit_1(capsys):
    code, _, _ = call(capsys, "mgood", "--pair", '{"c": [1]}')
    assert code == 1
    code, _, _ = call(capsys, "mgood", "--input", "/nonexistent/file.json")
    assert code == 1


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run(["rho", "--pair", PAIR])
    assert exc.value.code == 2


def test_csv_and_text(capsys):
    _, out, _ = call(capsys, "optimize", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "key,value" and "delta_star,566/34905" in lines
    _, out, _ = call(capsys, "optimize", "--format", "text")
    assert "optimal_exponent: 2327" in out


def test_input_file_csv(capsys, tmp_path):
    f = tmp_path / "pair.csv"
    f.write_text("1,2,3\n1,0,-1\n")
    code, out, _ = call(capsys, "mgood", "--input", str(f))
    assert code == 0 and "M_good" in json.loads(out) or "mgood" in out.lower()


def test_verify_mod9_reports_failures(capsys):
    code, out, _ = call(capsys, "verify-mod9")
    data = json.loads(out)
    assert code == 1 and data["passed"] is False and data["failure_count"] > 0


def test_paper_check_subset(capsys):
    code, out, err = call(capsys, "paper-check", "--only", "1", "6")
    data = json.loads(out)
    assert code == 0 and data["total"] == 2 and data["all_passed"]
    assert "[PASS] criterion  1" in err
