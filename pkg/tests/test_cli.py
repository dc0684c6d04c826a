"""Command-line interface: exit codes, report format, determinism."""

import json
import re
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from qbhkit.cli import EXIT_ERROR, EXIT_MISMATCH, EXIT_OK, infer_coords, main
from qbhkit.fixtures import DEFINITIONS, shipped_text
from qbhkit.symexpr import Chart, add, decide_zero, neg, parse_expr

SCHEMA = json.loads(resources.files("qbhkit").joinpath("data", "report.schema.json").read_text())
WALL_TIME = re.compile(r'"wall_time": [0-9.e+-]+')


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def without_timing(text):
    return WALL_TIME.sub('"wall_time": 0', text)


@pytest.mark.parametrize("name", list(DEFINITIONS))
def test_demo_exits_zero_and_report_validates(capsys, name):
    code, out, _ = run(capsys, "demo", name, "--json")
    assert code == EXIT_OK
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["overall"] == "pass" and report["name"] == name


@pytest.mark.parametrize("name", list(DEFINITIONS))
def test_identical_inputs_give_identical_reports(capsys, name):
    first = run(capsys, "demo", name, "--json")[1]
    second = run(capsys, "demo", name, "--json")[1]
    assert without_timing(first) == without_timing(second)


def test_run_file_matches_demo(capsys, tmp_path):
    path = tmp_path / "hojman.toml"
    path.write_text(shipped_text("hojman"))
    code, out, _ = run(capsys, "run", str(path), "--json")
    assert code == EXIT_OK
    demo = run(capsys, "demo", "hojman", "--json")[1]
    assert without_timing(out) == without_timing(demo)


def test_mismatch_exits_one(capsys, tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text(shipped_text("hojman").replace('conserved = "exact"', 'conserved = "nonzero"'))
    code, out, _ = run(capsys, "run", str(path))
    assert code == EXIT_MISMATCH
    assert "[BAD] hojman" in out and "overall: FAIL" in out


def test_undeclared_reference_exits_two(capsys, tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text(shipped_text("hojman").replace('X3 = "X3"', 'X3 = "X9"'))
    code, out, err = run(capsys, "run", str(path))
    assert code == EXIT_ERROR and out == ""
    assert err.startswith("qbhkit: error:") and "X9" in err


def test_missing_file_exits_two(capsys, tmp_path):
    code, _, err = run(capsys, "run", str(tmp_path / "none.toml"))
    assert code == EXIT_ERROR and "cannot read" in err


def test_unknown_demo(capsys):
    code, _, err = run(capsys, "demo", "nope")
    assert code == EXIT_ERROR and "list-demos" in err


def test_list_demos(capsys):
    code, out, _ = run(capsys, "list-demos")
    assert code == EXIT_OK
    assert [line.split()[0] for line in out.splitlines()] == list(DEFINITIONS)


def test_policy_flags_reach_the_report(capsys):
    code, out, _ = run(capsys, "demo", "hojman", "--json", "--tol", "1e-7", "--samples", "30", "--seed", "9")
    assert code == EXIT_OK
    assert json.loads(out)["policy"] == {"tolerance": 1e-7, "samples": 30, "seed": 9}


def test_bad_policy_exits_two(capsys):
    code, _, err = run(capsys, "demo", "hojman", "--samples", "0")
    assert code == EXIT_ERROR and "error" in err


def test_text_report_quiet(capsys):
    loud = run(capsys, "demo", "example2-derived")[1]
    quiet = run(capsys, "demo", "example2-derived", "--quiet")[1]
    assert len(quiet.splitlines()) < len(loud.splitlines())
    assert quiet.splitlines()[-1].startswith("overall: PASS")


def test_expr_diff_is_correct(capsys):
    code, out, _ = run(capsys, "expr", "diff", "atan(x2/x1)", "--wrt", "x1")
    assert code == EXIT_OK
    chart = Chart.build(("x2", "x1"), box=[(-2, 2), (0.5, 2)])
    got = parse_expr(out.strip(), chart)
    want = parse_expr("-x2/(x1^2 + x2^2)", chart)
    assert decide_zero(add(got, neg(want)), chart).is_zero


def test_expr_diff_with_absent_variable(capsys):
    code, out, _ = run(capsys, "expr", "diff", "sin(x1)", "--wrt", "x2")
    assert code == EXIT_OK and out.strip() == "0"


def test_expr_eval(capsys):
    assert run(capsys, "expr", "eval", "x1^2 + x2", "--at", "x1=2,x2=1")[1].strip() == "5"
    assert run(capsys, "expr", "eval", "x1^2 + x2", "--at", "2,1")[1].strip() == "5"
    assert run(capsys, "expr", "eval", "x1/x2", "--at", "1,4")[1].strip() == "0.25"


def test_expr_eval_errors(capsys):
    code, _, err = run(capsys, "expr", "eval", "ln(x1)", "--at", "x1=-1")
    assert code == EXIT_ERROR and "qbhkit: error:" in err
    assert run(capsys, "expr", "eval", "x1 + x2", "--at", "x1=1")[0] == EXIT_ERROR
    assert run(capsys, "expr", "eval", "x1 +", "--at", "x1=1")[0] == EXIT_ERROR
    assert run(capsys, "expr", "eval", "x1 + x2", "--at", "1")[0] == EXIT_ERROR


def test_infer_coords():
    assert infer_coords("atan(x2/x1) + 1e-3*x3") == ("x2", "x1", "x3")
    assert infer_coords("sin(u)*exp(v) + w") == ("u", "v", "w")


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "qbhkit", "demo", "so3-jacobi", "--quiet"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == EXIT_OK
    assert "overall: PASS" in done.stdout
