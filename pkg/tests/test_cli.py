import json

import pytest

from pwqh.cli import main


def run(capsysbinary, *argv):
    code = main(list(argv))
    out, err = capsysbinary.readouterr()
    return code, out.decode(), err.decode()


def test_xi_max(capsysbinary):
    assert run(capsysbinary, "xi-max", "--n", "3") == (0, '{"n":3,"xi_max":4}\n', "")


def test_center_accepts_negative_parameter_list(capsysbinary):
    code, out, _ = run(capsysbinary, "center", "--params", "-1,1,1", "--radii", "1,8")
    assert code == 0
    data = json.loads(out)
    assert data["report"]["is_center"]
    assert [row["rel_err"] < 1e-8 for row in data["periods"]] == [True, True]
    assert data["periods"][0]["T_closed"] == pytest.approx(6.420391306477853, rel=1e-14)


def test_analyze_reports_switching_and_case(capsysbinary):
    code, out, _ = run(capsysbinary, "analyze", "--params", "-1,-1,1")
    data = json.loads(out)
    assert code == 0
    assert data["switching"]["sliding"] == {"kind": "axis"}
    assert data["case"]["has_center"] is False


def test_analyze_reads_system_file(capsysbinary, tmp_path):
    system = {"upper": {"P": [[0, 2, -2]], "Q": [[1, 0, 4]]}, "lower": {"P": [[0, 2, 3]], "Q": [[1, 0, 2]]}}
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(system))
    code, out, _ = run(capsysbinary, "analyze", str(path))
    assert code == 0
    assert json.loads(out)["canonical"]["form"]["variant"] == "I"


def test_realize_then_melnikov_roundtrip(capsysbinary, tmp_path):
    code, out, _ = run(capsysbinary, "realize", "--params", "-1,1,1", "--n", "2", "--roots", "1,8,27")
    assert code == 0
    spec = tmp_path / "spec.json"
    spec.write_text(out)
    code, out, _ = run(capsysbinary, "melnikov", "--params", "-1,1,1", "--spec", str(spec))
    data = json.loads(out)
    assert code == 0
    assert data["exponents"] == [0, 2, 4, 6] and data["variations"] == 3 and data["xi_max"] == 3
    assert [r["h"] for r in data["roots"]] == pytest.approx([1, 8, 27], rel=1e-9)


def test_simulate_csv_and_out_file(capsysbinary, tmp_path):
    target = tmp_path / "orbit.csv"
    code, out, _ = run(capsysbinary, "simulate", "--params", "-1,1,1", "--x0", "1,0", "--zone", "upper",
                       "--tmax", "4", "--out", str(target))
    assert code == 0 and out == ""
    lines = target.read_text().splitlines()
    assert lines[0] == "t,x,y,event" and any(line.endswith(",crossing") for line in lines)


def test_portrait_writes_svg(capsysbinary):
    code, out, _ = run(capsysbinary, "portrait", "--params", "-1,1,1", "--grid", "4")
    assert code == 0 and out.startswith("<?xml") and "<svg" in out


@pytest.mark.parametrize(
    "argv,code,error",
    [
        (["realize", "--params", "-1,1,1", "--n", "1", "--roots", "1,2"], 1, "TooManyRoots"),
        (["center", "--params", "1,2"], 2, "UsageError"),
        (["analyze", "does-not-exist.json"], 2, "IOError"),
        (["bogus"], 2, "UsageError"),
        (["melnikov", "--params", "1,1,1", "--spec", "-"], 2, "IOError"),
    ],
)
def test_exit_codes(capsysbinary, monkeypatch, argv, code, error):
    import io
    import sys

    monkeypatch.setattr(sys, "stdin", io.StringIO(""))
    got, out, err = run(capsysbinary, *argv)
    assert got == code and out == ""
    assert json.loads(err)["error"] == error


def test_not_a_center_is_a_math_error(capsysbinary, tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text('{"n":1,"d_plus":[[0,0,1]]}')
    got, _, err = run(capsysbinary, "melnikov", "--params", "1,1,1", "--spec", str(spec))
    assert got == 1 and json.loads(err)["error"] == "NotACenter"
