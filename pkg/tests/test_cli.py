import csv
import io
import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from normeq.cli import main, parse_csv_matrix, parse_json_matrix
from normeq.matrix import residual
from normeq.scalar import SolverParams


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def matrix_file(tmp_path):
    def make(M, fmt="csv"):
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if fmt == "csv":
            p = tmp_path / "Y.csv"
            p.write_text("\n".join(",".join(repr(float(v)) for v in row) for row in M) + "\n")
        else:
            p = tmp_path / "Y.json"
            p.write_text(json.dumps({"rows": M.shape[0], "cols": M.shape[1],
                                     "data": M.ravel().tolist()}))
        return str(p)
    return make


class TestExamples:
    def test_solve_zero_case_a(self):
        r = run_json("solve", "--a", "1", "--b", "-1", "--zero", "3", "3")
        assert r["case"] == "A"
        assert len(r["solutions"]) == 1
        assert r["solutions"][0]["matrix"] == [[0.0] * 3] * 3

    def test_classify_j(self):
        code, out, _ = run("classify", "--a", "15", "--b", "1", "--y", "6")
        assert code == 0
        assert out.startswith("case J: 3 solution(s)")
        assert "t0 = 6.62281" in out and "t1 = 5.07215" in out
        r = run_json("classify", "--a", "15", "--b", "1", "--y", "6")
        assert r["case"] == "J" and r["expected_count"] == 3
        assert r["thresholds"]["t0"] == pytest.approx(6.62280851197289408, rel=1e-12)
        assert r["thresholds"]["t1"] == pytest.approx(5.07215437258362356, rel=1e-12)

    def test_solve_degenerate(self):
        code, out, _ = run("solve", "--a", "-0.5", "--b", "-10", "--zero", "2", "2")
        assert code == 0
        assert "degenerate: {0} ∪ sphere radius 6.931471805599453" in out
        assert out.count("sample ") == 3
        r = run_json("solve", "--a", "-0.5", "--b", "-10", "--zero", "2", "2")
        d = r["solutions"]["degenerate"]
        assert d["radius"] == pytest.approx(10 * math.log(2), rel=1e-15)
        for M in d["samples"]:
            assert np.linalg.norm(M) == pytest.approx(d["radius"], rel=1e-14)


class TestErrors:
    @pytest.mark.parametrize("argv", [
        ["solve", "--a", "1", "--b", "0", "--zero", "2", "2"],
        ["solve", "--a", "1", "--b", "1", "--zero", "2", "2", "--norm", "nuclear"],
        ["solve", "--a", "1", "--b", "1"],
        ["solve", "--b", "1", "--zero", "2", "2"],
        ["frobnicate"],
        [],
        ["classify", "--a", "1", "--b", "1", "--y", "-1"],
        ["sample", "--a", "0.5", "--b", "1"],
        ["sample", "--radius", "1", "--c", "2"],
        ["solve", "--a", "1", "--b", "1", "--input", "/nonexistent/Y.csv"],
    ])
    def test_usage_exit_2(self, argv):
        code, out, err = run(*argv)
        assert code == 2
        assert out == ""
        assert err.startswith("error:")
        assert err.count("\n") == 1

    @pytest.mark.parametrize("text", ["1,2\n3", "1,x\n3,4", ""])
    def test_malformed_csv(self, tmp_path, text):
        p = tmp_path / "bad.csv"
        p.write_text(text)
        code, _, err = run("solve", "--a", "1", "--b", "1", "--input", str(p))
        assert code == 2 and err.startswith("error:")

    @pytest.mark.parametrize("text", ['{"rows": 2, "cols": 2, "data": [1, 2, 3]}',
                                      '{"rows": 2, "data": [1, 2]}', "{oops"])
    def test_malformed_json(self, tmp_path, text):
        p = tmp_path / "bad.json"
        p.write_text(text)
        code, _, err = run("solve", "--a", "1", "--b", "1", "--input", str(p))
        assert code == 2 and err.startswith("error:")

    def test_solver_failure_exit_1(self, monkeypatch):
        from normeq import cli
        from normeq.errors import ConvergenceError

        def boom(*a, **k):
            raise ConvergenceError("no luck")

        monkeypatch.setattr(cli, "solve_equation", boom)
        code, _, err = run("solve", "--a", "1", "--b", "1", "--zero", "2", "2")
        assert code == 1
        assert err == "error: solver failure: no luck\n"


class TestParsing:
    def test_csv(self):
        np.testing.assert_array_equal(parse_csv_matrix(" 1, 2\n\n3,4.5\n"), [[1, 2], [3, 4.5]])

    def test_json(self):
        M = parse_json_matrix('{"rows": 2, "cols": 3, "data": [1, 2, 3, 4, 5, 6]}')
        np.testing.assert_array_equal(M, [[1, 2, 3], [4, 5, 6]])

    def test_csv_and_json_agree(self, matrix_file):
        Y = [[1.0, -2.0], [0.5, 3.0]]
        a = run_json("solve", "--a", "15", "--b", "1", "--input", matrix_file(Y, "csv"))
        b = run_json("solve", "--a", "15", "--b", "1", "--input", matrix_file(Y, "json"))
        for r in (a, b):
            del r["timing_ms"]
        assert a == b


class TestReports:
    Y = [[1.0, 2.0], [-1.5, 0.5]]

    @pytest.mark.parametrize("kind", ["one", "two", "inf", "frobenius"])
    @pytest.mark.parametrize("a,b", [(15.0, 1.0), (-0.5, -10.0), (-2.0, 10.0), (1.0, -1.0)])
    def test_json_residuals_reproduce(self, matrix_file, kind, a, b):
        r = run_json("solve", "--a", repr(a), "--b", repr(b), "--norm", kind,
                     "--input", matrix_file(self.Y))
        assert len(r["solutions"]) == len(r["residuals"]) >= 1
        for s in r["solutions"]:
            res = residual(SolverParams(a, b), np.array(s["matrix"]), np.array(self.Y), kind)
            assert res == pytest.approx(s["residual"], rel=1e-12, abs=1e-300)
            assert s["residual"] <= 1e-10 * max(1.0, r["y"])

    def test_text_and_json_roots_agree(self, matrix_file):
        scale = 5.8 / np.linalg.norm(self.Y)
        path = matrix_file(np.array(self.Y) * scale)
        r = run_json("solve", "--a", "15", "--b", "1", "--input", path)
        _, out, _ = run("solve", "--a", "15", "--b", "1", "--input", path)
        line = next(ln for ln in out.splitlines() if ln.startswith("roots:"))
        printed = [float(v) for v in re.findall(r"([-\d.e+]+) \(", line)]
        assert len(printed) == len(r["roots"]) == 3
        for p, root in zip(printed, r["roots"]):
            assert float(f"{root['x']:.6g}") == p

    def test_sign_and_thresholds(self, matrix_file):
        r = run_json("solve", "--a", "15", "--b", "1", "--zero", "2", "2")
        assert r["case"] == "H"
        assert [x["x"] for x in r["roots"]] == [0.0]
        assert set(r["thresholds"]) == {"t0", "t1"}

    def test_classify_from_matrix(self, matrix_file):
        r = run_json("classify", "--a", "1", "--b", "-1", "--input", matrix_file(self.Y))
        assert r["case"] == "A"
        assert r["y"] == pytest.approx(np.linalg.norm(self.Y), rel=1e-15)

    def test_newton_method(self, matrix_file):
        a = run_json("solve", "--a", "1", "--b", "-1", "--input", matrix_file(self.Y))
        b = run_json("solve", "--a", "1", "--b", "-1", "--input", matrix_file(self.Y),
                     "--method", "newton")
        assert a["roots"][0]["x"] == pytest.approx(b["roots"][0]["x"], rel=1e-14)


class TestSample:
    @pytest.mark.parametrize("kind", ["one", "two", "inf", "frobenius"])
    def test_radius_from_params(self, kind):
        r = run_json("sample", "--a", "-0.5", "--b", "-10", "--norm", kind, "--count", "5")
        assert r["radius"] == pytest.approx(10 * math.log(2), rel=1e-15)
        assert len(r["samples"]) == 5
        for s in r["samples"]:
            assert s["norm_value"] == pytest.approx(r["radius"], rel=1e-14)

    def test_explicit_c(self):
        r = run_json("sample", "--radius", "5", "--c", "3", "--c", "0", "--shape", "3", "2")
        assert r["samples"][0]["matrix"] == [[4.0, 3.0], [0.0, 0.0], [0.0, 0.0]]
        assert [s["c"] for s in r["samples"]] == [3.0, 0.0]


class TestSimulate:
    def test_writes_trajectory(self, tmp_path):
        blocks = ["1,0,0\n0,-1,0\n0,0,0", "0,0,0\n0,0,0\n0,0,0", "0,0.5,0\n0.5,0,0\n0,0,0"]
        drv = tmp_path / "drive.csv"
        drv.write_text("\n\n".join(blocks) + "\n")
        dest = tmp_path / "traj.csv"
        code, out, err = run("simulate", "--dt", "0.1", "--tau-p", "1", "--sigma-c", "2",
                             "--driving", str(drv), "--output", str(dest))
        assert code == 0, err
        assert "3 steps" in out
        rows = list(csv.reader(dest.open()))
        assert rows[0][:2] == ["step", "s11"] and rows[0][-3:] == ["norm", "root", "coefficient"]
        assert [int(r[0]) for r in rows[1:]] == [1, 2, 3]
        norms = [float(r[10]) for r in rows[1:]]
        assert norms[1] < norms[0]

    def test_stdout_output(self, tmp_path):
        drv = tmp_path / "drive.csv"
        drv.write_text("1,0,0\n0,-1,0\n0,0,0\n")
        code, out, _ = run("simulate", "--dt", "0.1", "--tau-p", "1", "--sigma-c", "1",
                           "--driving", str(drv), "--output", "-")
        assert code == 0
        assert len(out.strip().splitlines()) == 2

    def test_bad_block(self, tmp_path):
        drv = tmp_path / "drive.csv"
        drv.write_text("1,0\n0,1\n")
        code, _, err = run("simulate", "--dt", "0.1", "--tau-p", "1", "--sigma-c", "1",
                           "--driving", str(drv), "--output", "-")
        assert code == 2 and "3x3" in err

    def test_bad_config(self, tmp_path):
        drv = tmp_path / "drive.csv"
        drv.write_text("0,0,0\n0,0,0\n0,0,0\n")
        code, _, err = run("simulate", "--dt", "-1", "--tau-p", "1", "--sigma-c", "1",
                           "--driving", str(drv), "--output", "-")
        assert code == 2 and err.startswith("error:")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "normeq", "classify", "--a", "1", "--b", "-1",
                           "--y", "2"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("case A")
