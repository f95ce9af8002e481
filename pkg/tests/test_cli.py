import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from beattysolve.cli import run

SCHEMA = json.loads(resources.files("beattysolve").joinpath("report.schema.json").read_text())


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--format", "json", "--no-timing")
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    return code, rep


@pytest.fixture
def formula(tmp_path):
    def write(text):
        p = tmp_path / "sys.bf"
        p.write_text(text)
        return str(p)
    return write


def test_solve_sat_text(formula):
    code, out, _ = call("solve", formula("f(x) = 31"))
    assert code == 0 and out == "sat\nx = 10\n"


def test_solve_json_exit_codes(formula):
    code, rep = call_json("solve", formula("f(x) + f(y) = 41"))
    assert code == 1 and rep["status"] == "unsat" and rep["witness"] is None
    code, rep = call_json("solve", formula("f(x) + f(y) = 40; frac(x) < frac(y)"))
    assert code == 0 and rep["status"] == "sat"
    assert set(rep["witness"]) == {"x", "y"} and rep["precision_bits"] >= 64
    assert rep["elapsed_ms"] == 0 and rep["certificate"]


def test_syntax_error_reports_position(formula):
    code, out, err = call("solve", formula("f(x = 3"))
    assert code == 3 and out == ""
    assert "line 1, column 5" in err
    code, rep = call_json("solve", formula("f(x = 3"))
    assert code == 3 and rep["status"] == "error"


def test_eval_and_env():
    assert call("eval", "f(f(x)) + y", "--env", "x=10,y=-3") == (0, "94\n", "")
    code, _, err = call("eval", "f(x)")
    assert code == 3 and "x" in err
    code, rep = call_json("eval", "f(x)", "--env", "x=113", "--alpha", "e")
    assert rep["value"] == "307"


def test_oracle_subcommand(formula):
    code, rep = call_json("oracle", formula("f(x) = 31"), "--bound", "50")
    assert code == 0 and rep["solutions"] == [{"x": "10"}]
    code, rep = call_json("oracle", formula("f(x) + f(y) = 41"), "--box", "x=-50..50,y=-50..50")
    assert code == 1 and rep["solutions"] == []


def test_kronecker_congpair_progression():
    code, rep = call_json("kronecker", "--targets", "0:(0,1/5);1:(1/2,1)")
    assert code == 0 and rep["witness"] == {"x": "8"}
    code, rep = call_json("congpair", "2", "1", "3", "0")
    assert code == 0 and rep["witness"] == {"x": "1"}
    code, rep = call_json("progression", "f(x)", "3")
    assert code == 0 and rep["progression"]["length"] == 3
    code, _, err = call("kronecker", "--targets", "0:(1/2,1/3)")
    assert code == 3 and "lo < hi" in err


def test_check_axioms():
    code, rep = call_json("check-axioms", "--suite", "order", "--suite", "range", "--samples", "50")
    assert code == 0 and [s["suite"] for s in rep["suites"]] == ["order", "range"]
    assert all(s["failed"] == 0 for s in rep["suites"])


def test_budget_exhaustion_is_exit_2():
    code, rep = call_json("kronecker", "--targets", "0:(0,1/1000);1:(0,1/1000)", "--budget", "10")
    assert code == 2 and rep["status"] == "none"


def test_bad_usage():
    assert call("solve")[0] == 3
    assert call("frobnicate")[0] == 3
    assert call("eval", "f(x)", "--alpha", "tau")[0] == 3


def test_digit_file_alpha(tmp_path):
    p = tmp_path / "pi.txt"
    p.write_text("3\n1415926535897932384626433832795028841971693993751058209749445923078164\n")
    code, out, _ = call("eval", "f(x)", "--env", "x=113", "--alpha", f"digits:{p}")
    assert (code, out) == (0, "354\n")


def test_stdin_and_console_script(formula):
    proc = subprocess.run([sys.executable, "-m", "beattysolve.cli", "solve", "-"], input="f(x) = 31\n",
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.splitlines()[0] == "sat"


def test_json_reports_are_byte_identical(formula):
    path = formula("f(x + y) - f(x) = 3; frac(x) < frac(y)")
    a = call("solve", path, "--format", "json", "--no-timing")
    b = call("solve", path, "--format", "json", "--no-timing", "--workers", "4")
    assert a == b
