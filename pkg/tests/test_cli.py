import json
import subprocess
import sys

import pytest

from fractalzeta.cli import main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_construct(capsys):
    code, out, err = run(["construct", "--dinf", "0.2", "--d1", "0.5", "--d", "0.5"], capsys)
    assert code == 0 and err == ""
    d = json.loads(out)
    rep = d["report"]
    assert (rep["d_par"], rep["d_mer"], rep["d_abs"], rep["barrier"]) == (0.2, 0.5, 0.5, 0.2)
    assert d["construction"]["extra_atom"] is None


def test_construct_second_case(capsys):
    code, out, _ = run(["construct", "--dinf", "0.2", "--d1", "0.5", "--d", "0.8"], capsys)
    d = json.loads(out)
    assert code == 0 and d["construction"]["case"] == "ii"
    assert d["construction"]["extra_atom"]["dimension"] == pytest.approx(0.8, rel=1e-15)


def test_construct_invalid(capsys):
    code, out, err = run(["construct", "--dinf", "0.5", "--d1", "0.5", "--d", "0.6"], capsys)
    assert code == 2 and out == ""
    assert "d_inf < d1" in err


def test_eval(capsys):
    code, out, _ = run(["eval", "--expr", "gencantor:2,0.3333333333", "--s", "1+0i"], capsys)
    d = json.loads(out)
    assert code == 0
    assert abs(d["value"]["re"] - 3) <= 1e-8
    assert d["error_bound"] <= d["tol"]


def test_eval_on_lattice_point_exits_3(capsys):
    code, out, err = run(["eval", "--expr", "gencantor:2,0.25", "--s", "0.5+0i"], capsys)
    assert code == 3 and out == "" and "singularity" in err


def test_eval_left_of_barrier_exits_3(capsys):
    code, _, _ = run(["eval", "--dinf", "0.2", "--d1", "0.5", "--d", "0.5", "--s", "0.1+1i"], capsys)
    assert code == 3


def test_lengths(capsys):
    code, out, _ = run(["lengths", "--expr", "cantor", "--n", "7"], capsys)
    d = json.loads(out)
    assert code == 0 and d["count"] == 7
    assert [(x["length"], x["multiplicity"]) for x in d["lengths"]] == [(1 / 3, 1), (1 / 9, 2), (1 / 27, 4)]
    code, out, _ = run(["lengths", "--expr", "cantor", "--n", "3", "--format", "csv"], capsys)
    assert out.splitlines() == ["length,multiplicity", "%.17g,1" % (1 / 3), "%.17g,2" % (1 / 9)]


def test_dim(capsys):
    code, out, _ = run(["dim", "--expr", "gencantor:2,1/3"], capsys)
    d = json.loads(out)
    assert code == 0 and d["agrees"]
    assert d["exact"]["method"] == "exact-symbolic"


def test_dzeta_measure_identity(capsys):
    code, out, _ = run(["dzeta", "--set", "realization:cantor", "--s", "1", "--delta", "1"], capsys)
    d = json.loads(out)
    assert code == 0 and d["method"] == "closed-form"
    assert abs(d["value"]["re"] - 3.0) <= d["error_bound"] + 1e-15


def test_dzeta_monte_carlo_reports_stderr(capsys):
    argv = ["dzeta", "--set", "grill:1(realization:cantor)", "--s", "1.9", "--delta", "0.3333333333333333",
            "--n", "20000", "--seed", "3"]
    code, out, _ = run(argv, capsys)
    d = json.loads(out)
    assert code == 0 and d["method"] == "monte-carlo"
    assert d["stderr"] > 0 and d["n_samples"] == 20000 and d["seed"] == 3
    _, again, _ = run(argv, capsys)
    assert again == out


def test_scan_csv(capsys, tmp_path):
    target = tmp_path / "grid.csv"
    code, out, err = run(["scan", "--dinf", "0.2", "--d1", "0.5", "--d", "0.5", "--window", "0.45:0.55:-1:1",
                          "--res", "5x5", "--markers-only", "--format", "csv", "--out", str(target)], capsys)
    assert code == 0 and out == "" and err == ""
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "re,im,zeta_re,zeta_im,abs,log_abs,marker"
    assert sum(l.endswith("singularity-proximal") for l in lines[1:26]) == 1
    assert lines[26:] == ["# singularities", "re,im,kind", "0.5,0,essential"]


def test_scan_clipping_warns_on_stderr(capsys):
    code, out, err = run(["scan", "--dinf", "0.2", "--d1", "0.5", "--d", "0.5", "--window", "0:0.6:0:1",
                          "--res", "4x3", "--markers-only"], capsys)
    assert code == 0
    assert err.startswith("warning:") and "clipped" in err
    assert json.loads(out)["clipped"] is True


@pytest.mark.parametrize(
    "argv",
    [
        ["scan", "--expr", "cantor", "--window", "0:1:0", "--res", "4x4"],
        ["scan", "--expr", "cantor", "--window", "0:1:0:1", "--res", "four"],
        ["eval", "--expr", "cantor", "--dinf", "0.2", "--d1", "0.5", "--d", "0.5", "--s", "1"],
        ["eval", "--expr", "nonsense", "--s", "1"],
        ["eval", "--dinf", "0.2", "--s", "1"],
        ["construct", "--dinf", "0.2", "--d1", "0.5", "--d", "0.5", "--format", "csv"],
    ],
)
def test_invalid_input_exits_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2 and out == "" and err.startswith("error:")


def test_report_writes_files(capsys, tmp_path):
    code, out, _ = run(["report", "--dinf", "0.2", "--d1", "0.5", "--d", "0.5", "--out-dir", str(tmp_path),
                        "--res", "12x8", "--n", "2000"], capsys)
    assert code == 0
    files = json.loads(out)["files"]
    assert set(files) == {"construction.json", "scan.csv", "dimension.json", "scan.png", "singularities.png", "counting.png"}
    for name in files:
        assert (tmp_path / name).stat().st_size > 0
    assert (tmp_path / "scan.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "fractalzeta.cli", "lengths", "--expr", "unit", "--n", "1"],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0 and r.stderr == ""
    assert json.loads(r.stdout)["count"] == 1
