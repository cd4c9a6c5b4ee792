import json
import math
import os
import subprocess
import sys
from pathlib import Path


from quatode import SolutionTable, compare, solve_ivp
from quatode.cli import run

from helpers import diag_problem

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def _run(args, capsys):
    code = run(args)
    out, err = capsys.readouterr()
    return code, out, err


def _write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_detp_fixture(capsys):
    code, out, err = _run(["--input", str(PROBLEMS / "detp_2x2.json")], capsys)
    assert code == 0
    assert out == "-2i\n"


def test_ddet_fixture(capsys):
    code, out, err = _run(["--input", str(PROBLEMS / "ddet_2x2.json")], capsys)
    assert code == 0
    assert out == "4\n"


def test_inverse_fixture(capsys):
    code, out, err = _run(["--input", str(PROBLEMS / "inverse_2x2.json")], capsys)
    assert code == 0
    assert out == "-0.5j,0.5\n0.5i,-0.5k\n"


def test_eig_fixture(capsys):
    code, out, err = _run(["--input", str(PROBLEMS / "eig_triangular.json")], capsys)
    assert code == 0
    lams = [line.split(",")[0] for line in out.strip().splitlines()]
    assert lams == ["i", "1+i"]


def test_ivp_fixture_initial_row(tmp_path, capsys):
    out_path = tmp_path / "sol.csv"
    code, _, _ = _run(["--input", str(PROBLEMS / "ivp_diag_jk.json"),
                       "--output", str(out_path)], capsys)
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == ("t,x1.w,x1.i,x1.j,x1.k,x2.w,x2.i,x2.j,x2.k")
    assert lines[1] == "0,0,0,1,0,0,0,0,1"  # x1 = j, x2 = k
    assert len(lines) == 102


def test_csv_deterministic_across_runs(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = _run(["--input", str(PROBLEMS / "ivp_triangular.json"),
                           "--output", str(path)], capsys)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_round_trip_gives_zero_distance(tmp_path, capsys):
    out_path = tmp_path / "sol.json"
    code, _, _ = _run(["--input", str(PROBLEMS / "ivp_diag_jk.json"),
                       "--format", "json", "--output", str(out_path)], capsys)
    assert code == 0
    doc = json.loads(out_path.read_text())
    tab = SolutionTable.from_json_dict(doc)
    sol = solve_ivp(diag_problem())
    assert compare(sol, tab) == 0.0


def test_verify_flag_adds_residual_column(tmp_path, capsys):
    out_path = tmp_path / "sol.csv"
    code, _, _ = _run(["--input", str(PROBLEMS / "ivp_diag_jk.json"),
                       "--verify", "--output", str(out_path)], capsys)
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0].endswith(",residual")
    interior = [float(line.split(",")[-1]) for line in lines[2:-1]]
    assert max(interior) <= 1e-4


def test_periodic_fixture(tmp_path, capsys):
    out_path = tmp_path / "per.csv"
    code, _, _ = _run(["--input", str(PROBLEMS / "periodic_scalar.json"),
                       "--output", str(out_path)], capsys)
    assert code == 0
    lines = out_path.read_text().splitlines()
    first = [float(v) for v in lines[1].split(",")]
    last = [float(v) for v in lines[-1].split(",")]
    assert max(abs(a - b) for a, b in zip(first[1:], last[1:])) <= 1e-8
    # x(0) = -i/2 for the closed form (sin t - cos t)/2 i.
    assert abs(first[2] + 0.5) <= 1e-9


def test_fundamental_fixture(tmp_path, capsys):
    out_path = tmp_path / "fund.csv"
    code, _, _ = _run(["--input", str(PROBLEMS / "fundamental_diag.json"),
                       "--output", str(out_path)], capsys)
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("t,phi11.w,phi11.i,phi11.j,phi11.k,phi12.w")
    row0 = [float(v) for v in lines[1].split(",")]
    assert row0 == [0.0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0]


def test_samples_and_tol_overrides(tmp_path, capsys):
    out_path = tmp_path / "sol.csv"
    code, _, _ = _run(["--input", str(PROBLEMS / "ivp_diag_jk.json"),
                       "--samples", "11", "--tol", "1e-8",
                       "--output", str(out_path)], capsys)
    assert code == 0
    assert len(out_path.read_text().splitlines()) == 12


def test_missing_file_is_input_error(capsys):
    code, _, err = _run(["--input", "/nonexistent/problem.json"], capsys)
    assert code == 2
    assert "error:" in err


def test_bad_json_is_input_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = _run(["--input", str(p)], capsys)
    assert code == 2
    assert "JSON" in err


def test_schema_violations_are_input_errors(tmp_path, capsys):
    base = {"n": 2, "mode": "ivp", "A": [["j", "0"], ["0", "k"]],
            "x0": ["j", "k"], "t0": 0.0, "t_end": 1.0}
    bad = dict(base)
    bad["A"] = [["j"], ["0", "k"]]
    code, _, err = _run(["--input", _write(tmp_path, "a.json", bad)], capsys)
    assert code == 2 and "A" in err

    bad = dict(base)
    bad["mode"] = "steady"
    code, _, err = _run(["--input", _write(tmp_path, "b.json", bad)], capsys)
    assert code == 2 and "mode" in err

    bad = dict(base)
    del bad["x0"]
    code, _, err = _run(["--input", _write(tmp_path, "c.json", bad)], capsys)
    assert code == 2 and "x0" in err

    bad = dict(base)
    bad["extra"] = 1
    code, _, err = _run(["--input", _write(tmp_path, "d.json", bad)], capsys)
    assert code == 2 and "unknown" in err


def test_parse_error_reports_position(tmp_path, capsys):
    doc = {"n": 1, "mode": "ivp", "A": [["2i"]], "x0": ["1"],
           "t0": 0.0, "t_end": 1.0}
    code, _, err = _run(["--input", _write(tmp_path, "p.json", doc)], capsys)
    assert code == 2
    assert "position" in err


def test_x0_must_be_time_free(tmp_path, capsys):
    doc = {"n": 1, "mode": "ivp", "A": [["1"]], "x0": ["t"],
           "t0": 0.0, "t_end": 1.0}
    code, _, err = _run(["--input", _write(tmp_path, "x.json", doc)], capsys)
    assert code == 2
    assert "depend on t" in err


def test_singular_inverse_is_numeric_error(tmp_path, capsys):
    doc = {"n": 2, "mode": "inverse", "A": [["1", "1"], ["1", "1"]]}
    code, _, err = _run(["--input", _write(tmp_path, "s.json", doc)], capsys)
    assert code == 3
    assert "singular" in err.lower()


def test_resonant_periodic_is_numeric_error(tmp_path, capsys):
    doc = {"n": 1, "mode": "periodic", "A": [["j"]], "f": ["cos(t)"],
           "T": 2 * math.pi, "samples": 21}
    code, _, err = _run(["--input", _write(tmp_path, "r.json", doc)], capsys)
    assert code == 3
    assert "periodic" in err


def test_eig_rejects_time_varying_matrix(tmp_path, capsys):
    doc = {"n": 1, "mode": "eig", "A": [["t"]]}
    code, _, err = _run(["--input", _write(tmp_path, "e.json", doc)], capsys)
    assert code == 2
    assert "constant" in err


def test_console_entry_point_runs():
    env = dict(os.environ)
    code = subprocess.run(
        [sys.executable, "-m", "quatode.cli",
         "--input", str(PROBLEMS / "detp_2x2.json")],
        capture_output=True, text=True, env=env)
    assert code.returncode == 0
    assert code.stdout == "-2i\n"


def test_json_output_for_matrix_modes(capsys):
    code, out, _ = _run(["--input", str(PROBLEMS / "detp_2x2.json"),
                         "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["value"]["text"] == "-2i"
    assert doc["value"]["x"] == -2.0
