import math
from pathlib import Path

import pytest

from eulermac.analysis import read_csv
from eulermac.cli import main

POLY = Path(__file__).resolve().parent.parent / "polytopes"
TRIANGLE = str(POLY / "triangle.txt")
SQUARE = str(POLY / "square.txt")


def body(out: str) -> list[list[str]]:
    """Table rows without the ``#`` header lines, split on whitespace."""
    return [ln.split() for ln in out.splitlines() if ln.strip() and not ln.startswith("#")]


def test_sum(capsys):
    assert main(["sum", TRIANGLE, "--f", "x1", "--N", "1", "2"]) == 0
    rows = body(capsys.readouterr().out)
    assert rows[0] == ["N", "count", "S_N"]
    assert rows[1] == ["1", "3", "1"]
    assert rows[2] == ["2", "6", "1/2"]


def test_sum_float_is_round_trip(capsys):
    assert main(["sum", TRIANGLE, "--f", "exp(x1)", "--N", "3"]) == 0
    value = body(capsys.readouterr().out)[1][2]
    assert float(value) == pytest.approx(sum(math.exp(a / 3) for a in range(4) for b in range(4 - a)) / 9, rel=1e-15)


def test_header_records_defaults(capsys):
    main(["sum", TRIANGLE, "--f", "x1", "--N", "1"])
    out = capsys.readouterr().out
    assert "# threads: 1" in out and "# function: x1" in out


def test_expand_exact(capsys):
    assert main(["expand", TRIANGLE, "--f", "x1", "--Q", "4"]) == 0
    rows = body(capsys.readouterr().out)
    assert [r[1] for r in rows[1:6]] == ["1/6", "1/2", "1/3", "0", "0"]


def test_expand_reciprocal(capsys):
    assert main(["expand", TRIANGLE, "--f", "1/(1+x1+x2)", "--Q", "2"]) == 0
    T = [float(r[1]) for r in body(capsys.readouterr().out)[1:4]]
    assert abs(T[0] - (1 - math.log(2))) < 1e-10
    assert abs(T[1] - (0.25 + math.log(2))) < 1e-10
    assert abs(T[2] - 0.6875) < 1e-10


def test_expand_square_pick(capsys, tmp_path):
    out_csv = tmp_path / "square.csv"
    assert main(["expand", SQUARE, "--f", "1", "--Q", "2", "--csv", str(out_csv)]) == 0
    rows = body(capsys.readouterr().out)
    assert [r[1] for r in rows[1:4]] == ["1", "2", "1"]
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "face,T_0,T_1,T_2"
    assert lines[1] == "total,1,2,1"


def test_converge_exact_zero(capsys, tmp_path):
    path = tmp_path / "conv.csv"
    assert main(["converge", TRIANGLE, "--f", "x1", "--Q", "2", "--N-list", "1", "5", "10", "--csv", str(path)]) == 0
    out = capsys.readouterr().out
    assert "slope: undefined" in out
    rep = read_csv(path)
    assert [r.R for r in rep.rows] == [0, 0, 0]


def test_converge_first_order(capsys):
    assert main(["converge", TRIANGLE, "--f", "1/(1+x1+x2)", "--Q", "1",
                 "--N-list", "10", "25", "50", "100", "250"]) == 0
    line = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("# slope")][0]
    slope = float(line.split()[2])
    assert -2.15 <= slope <= -1.85


def test_validate(capsys):
    assert main(["validate", str(POLY / "hexagon.txt"), "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "sum_v (1/4 + mu/12) = 1" in out
    assert "unimodular image" in out


@pytest.mark.parametrize("text,line", [("dim 2\nfacet 1 1\n", 2), ("dim 2\nvertex 0 0\nvertex 1 0\nvertex 0 x\n", 4)])
def test_malformed_file_exit_2(tmp_path, capsys, text, line):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    assert main(["validate", str(p)]) == 2
    assert f"line {line}" in capsys.readouterr().err


def test_non_delzant_exit_2(tmp_path, capsys):
    p = tmp_path / "thin.txt"
    p.write_text("dim 2\nvertex 0 0\nvertex 2 1\nvertex 0 1\n")
    assert main(["validate", str(p)]) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_expression_exit_2(capsys):
    assert main(["sum", TRIANGLE, "--f", "x1 +* 2", "--N", "1"]) == 2
    assert main(["sum", TRIANGLE, "--f", "x3", "--N", "1"]) == 2


def test_missing_file_and_bad_args(capsys):
    assert main(["sum", "/nonexistent.txt", "--f", "1", "--N", "1"]) == 2
    assert main(["sum", TRIANGLE, "--f", "1", "--N", "0"]) == 2
    assert main(["expand", TRIANGLE, "--f", "1", "--Q", "-1"]) == 2


def test_budget_exit_3(capsys):
    assert main(["sum", TRIANGLE, "--f", "1", "--N", "1000", "--budget", "10"]) == 3
    assert "budget" in capsys.readouterr().err


def test_numerical_failure_exit_4(capsys):
    assert main(["sum", TRIANGLE, "--f", "log(x1)", "--N", "2"]) == 4
    # derivative singular at the vertex (0,0) makes the face integrals non-integrable
    assert main(["expand", TRIANGLE, "--f", "sqrt(x1+x2)", "--Q", "3"]) == 4
    assert "subdivision limit" in capsys.readouterr().err
