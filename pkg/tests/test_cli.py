import json
from pathlib import Path

import pytest

from lgfrob.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_p1_text(capsys):
    code, out, _ = run(capsys, "analyze", "-n", "1", "u1+u1^-1")
    assert code == 0
    assert "mu: 2" in out and "nu: 1" in out and "spectrum: 0 1" in out


def test_analyze_not_convenient(capsys):
    code, _, err = run(capsys, "analyze", "-n", "2", "u1+u2")
    assert code == 3 and "not-convenient" in err


def test_analyze_json_error_object(capsys):
    code, out, _ = run(capsys, "analyze", "-n", "2", "u1+u2", "--json")
    assert code == 3
    assert json.loads(out)["error"]["kind"] == "not-convenient"


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "spectrum", "-n", "1", "u1+^2")
    assert code == 2 and "parse" in err


def test_degenerate_exit_code(capsys):
    code, _, _ = run(capsys, "spectrum", "-n", "2", "u1^2+2*u1*u2+u2^2+u1^-1*u2^-1")
    assert code == 3


def test_not_subdiagram_exit_code(capsys):
    code, _, _ = run(capsys, "structure", "-n", "1", "u1+u1^-1", "--deform", "u1")
    assert code == 3


def test_analyze_golden(capsys):
    code, out, _ = run(capsys, "analyze", "-n", "2", "u1+u2+u1^-1*u2^-1", "--json")
    assert code == 0
    assert out == (GOLDEN / "analyze_p2.json").read_text()


def test_structure_golden(capsys):
    code, out, _ = run(capsys, "structure", "-n", "1", "u1+u1^-1", "--deform", "good-max", "--json")
    assert code == 0
    assert out == (GOLDEN / "structure_p1.json").read_text()


def test_json_is_byte_stable(capsys):
    outs = [run(capsys, "potential", "-n", "1", "u1^2+u1^-2", "--order", "3", "--json")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    assert "." not in "".join(c for c in outs[0] if not c.isspace()).replace("euler_convention", "")  # no floats


def test_potential_p2_contains_curve_counts(capsys):
    code, out, _ = run(capsys, "potential", "-n", "2", "u1+u2+u1^-1*u2^-1", "--order", "6", "--json")
    assert code == 0
    pot = {tuple(e): c for e, c in json.loads(out)["potential"]}
    assert pot[(0, 1, 2)] == "1/2"
    assert pot[(0, 0, 5)] == "1/120"
    assert pot[(0, 0, 8)] == "1/3360"


def test_deform_reports_extension(capsys):
    code, out, _ = run(capsys, "deform", "-n", "1", "u1+u1^-1", "--order", "3")
    assert code == 0
    assert "extended_primitive_map: (-x1, y1)" in out
    assert "good: True" in out


def test_deform_without_generation(capsys):
    code, _, _ = run(capsys, "deform", "-n", "2", "u1+u2+u1^-1+u2^-1")
    assert code == 3


@pytest.mark.parametrize("poly,n", [("u1+u1^-1", "1"), ("u1+u2+u1^-1*u2^-1", "2")])
def test_verify_passes(capsys, poly, n):
    code, out, _ = run(capsys, "verify", "-n", n, poly)
    assert code == 0
    assert "FAIL" not in out and out.count("PASS") >= 10
