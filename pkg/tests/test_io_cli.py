import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from fixtures.make_fixtures import PLANTED_FIT_FLAGS
from robust_ellipsoid import cli
from robust_ellipsoid.geometry import Ellipsoid, PointSet, coverage
from robust_ellipsoid.io import EllipsoidDocument, InputError, dumps, dumps_line, read_points, write_points


class TestReadPoints:
    def test_round_trip(self, tmp_path, rng):
        x = rng.standard_normal((7, 3))
        write_points(tmp_path / "p.csv", x)
        assert np.array_equal(read_points(tmp_path / "p.csv").points, x)

    def test_header_and_blank_lines(self, tmp_path):
        (tmp_path / "p.csv").write_text("x,y\n1,2\n\n3,4\n")
        assert read_points(tmp_path / "p.csv", header=True).points.tolist() == [[1, 2], [3, 4]]

    @pytest.mark.parametrize("text, match", [
        ("1,2\n3\n", "row 2 has 1 columns, expected 2"),
        ("1,2\n3,abc\n", "row 2"),
        ("1,2\n3,nan\n", "row 2"),
        ("", "empty"),
    ])
    def test_bad_files(self, tmp_path, text, match):
        (tmp_path / "p.csv").write_text(text)
        with pytest.raises(InputError, match=match):
            read_points(tmp_path / "p.csv")

    def test_missing(self, tmp_path):
        with pytest.raises(InputError):
            read_points(tmp_path / "nope.csv")


class TestDocument:
    def test_round_trip_bytes(self, rng):
        A = rng.standard_normal((3, 3))
        e = Ellipsoid(rng.standard_normal(3), A @ A.T + np.eye(3))
        doc = EllipsoidDocument.from_ellipsoid(e, alpha=0.1, seed=3)
        text = doc.dumps()
        again = EllipsoidDocument.loads(text)
        assert again.dumps() == text
        assert np.array_equal(again.center, e.center)
        assert np.array_equal(again.shape, np.tril(e.shape) + np.tril(e.shape, -1).T)

    def test_degenerate(self):
        doc = EllipsoidDocument.from_ellipsoid(Ellipsoid([0.0, 0.0], np.diag([1.0, 0.0])))
        d = json.loads(doc.dumps().replace("-Infinity", "null").replace("Infinity", "null"))
        assert d["degenerate_basis"] is not None and len(d["degenerate_basis"]) == 1
        assert "-Infinity" in doc.dumps() and '"condition_number": Infinity' in doc.dumps()
        again = EllipsoidDocument.loads(doc.dumps())
        assert again.log_volume == -math.inf and again.condition_number == math.inf

    def test_sorted_and_exact(self):
        text = dumps({"b": 0.1, "a": [1.0, -0.0]})
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text)["b"] == 0.1
        assert json.loads(dumps_line({"x": 1 / 3}))["x"] == 1 / 3

    def test_malformed(self):
        with pytest.raises(InputError):
            EllipsoidDocument.loads('{"dim": 2}')


def run_cli(*argv):
    return cli.main([str(a) for a in argv])


class TestCli:
    def test_missing_alpha_exits_1(self, fixtures, tmp_path, capsys):
        with pytest.raises(SystemExit) as info:
            run_cli("fit", "--input", fixtures / "square.csv", "--gamma", "0.5", "--out", tmp_path / "o.json")
        assert info.value.code == 1
        assert "usage" in capsys.readouterr().err

    def test_bad_row_exits_1(self, tmp_path, capsys):
        (tmp_path / "p.csv").write_text("1,2\n3,4,5\n")
        assert run_cli("fit", "--input", tmp_path / "p.csv", "--alpha", "0.1", "--gamma", "0.5",
                       "--out", tmp_path / "o.json") == 1
        assert "row 2" in capsys.readouterr().err

    def test_infeasible_exits_2(self, fixtures, tmp_path, capsys):
        # c2 = 0 asks for full coverage from the smallest ball only, which leaves points out
        code = run_cli("fit", "--input", fixtures / "planted2d.csv", "--alpha", "0.05", "--gamma", "0.25",
                       "--c2", "0", "--max-balls", "1", "--restarts", "1", "--out", tmp_path / "o.json")
        assert code == 2
        assert "best candidates" in capsys.readouterr().err
        assert not (tmp_path / "o.json").exists()

    def test_square_trivial(self, fixtures, tmp_path):
        out = tmp_path / "sq.json"
        assert run_cli("fit", "--input", fixtures / "square.csv", "--alpha", "0.01", "--gamma", "0.5", "--out", out) == 0
        doc = EllipsoidDocument.read(out)
        assert np.allclose(doc.shape, 2 * np.eye(2), atol=1e-6)
        assert doc.meta["coverage_count"] == 4

    def test_eval_unit_disk(self, tmp_path, capsys):
        EllipsoidDocument.from_ellipsoid(Ellipsoid([0.0, 0.0], np.eye(2))).write(tmp_path / "d.json")
        r = 1 / math.sqrt(2)
        write_points(tmp_path / "p.csv", [[r, r], [-r, r], [r, -r], [-r, -r]])
        assert run_cli("eval", "--doc", tmp_path / "d.json", "--input", tmp_path / "p.csv") == 0
        line = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert line["coverage_count"] == 4 and line["fraction"] == 1.0

    def test_eval_dim_mismatch(self, fixtures, tmp_path):
        EllipsoidDocument.from_ellipsoid(Ellipsoid([0.0], [[1.0]])).write(tmp_path / "d.json")
        assert run_cli("eval", "--doc", tmp_path / "d.json", "--input", fixtures / "square.csv") == 1

    def test_planted_golden(self, fixtures, tmp_path, capsys):
        out = tmp_path / "fit.json"
        assert run_cli("fit", "--input", fixtures / "planted2d.csv", *PLANTED_FIT_FLAGS, "--out", out) == 0
        report = capsys.readouterr().out
        got = EllipsoidDocument.read(out)
        want = EllipsoidDocument.read(fixtures / "planted2d.fit.json")
        assert got.meta == want.meta
        assert got.meta["coverage_count"] >= (1 - 4 * 0.05 / 0.25) * 200
        assert np.allclose(got.center, want.center, atol=1e-8)
        assert np.allclose(got.shape, want.shape, rtol=1e-7, atol=1e-8)
        assert got.log_volume == pytest.approx(want.log_volume, abs=1e-7)
        assert "coverage: 40/200" in report

    def test_fit_then_eval(self, fixtures, tmp_path, capsys):
        out = tmp_path / "fit.json"
        run_cli("fit", "--input", fixtures / "planted2d.csv", *PLANTED_FIT_FLAGS, "--out", out)
        capsys.readouterr()
        run_cli("eval", "--doc", out, "--input", fixtures / "planted2d.csv")
        line = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert line["coverage_count"] == EllipsoidDocument.read(out).meta["coverage_count"]

    def test_oracle_golden(self, fixtures, tmp_path):
        out = tmp_path / "o.json"
        assert run_cli("oracle", "--input", fixtures / "ten_points.csv", "--k", "8", "--out", out) == 0
        got, want = EllipsoidDocument.read(out), EllipsoidDocument.read(fixtures / "ten_points_k8.json")
        assert got.log_volume == pytest.approx(want.log_volume, abs=1e-9)
        assert np.allclose(got.shape, want.shape, atol=1e-9)

    def test_oracle_budget(self, fixtures, tmp_path, capsys):
        assert run_cli("oracle", "--input", fixtures / "ten_points.csv", "--k", "5", "--max-subsets", "10",
                       "--out", tmp_path / "o.json") == 1
        assert "budget" in capsys.readouterr().err

    def test_generate_then_eval(self, tmp_path, capsys):
        prefix = tmp_path / "pl"
        assert run_cli("generate", "planted", "--dim", "2", "--n", "200", "--beta", "10", "--alpha", "0.05",
                       "--seed", "5", "--out-prefix", prefix) == 0
        capsys.readouterr()
        run_cli("eval", "--doc", f"{prefix}.truth.json", "--input", f"{prefix}.csv")
        assert json.loads(capsys.readouterr().out.strip().splitlines()[-1])["coverage_count"] == 190

    def test_generate_matches_fixture(self, fixtures, tmp_path):
        run_cli("generate", "planted", "--dim", "2", "--n", "200", "--beta", "10", "--alpha", "0.05",
                "--seed", "5", "--out-prefix", tmp_path / "pl")
        assert (tmp_path / "pl.csv").read_bytes() == (fixtures / "planted2d.csv").read_bytes()

    def test_generate_other_kinds(self, fixtures, tmp_path):
        assert run_cli("generate", "subspace", "--dim", "5", "--planted-dim", "2", "--n", "50",
                       "--out-prefix", tmp_path / "s") == 0
        assert read_points(tmp_path / "s.basis.csv").points.shape == (2, 5)
        assert run_cli("generate", "sse", "--graph", fixtures / "graphs" / "c4.txt", "--eta-pad", "0",
                       "--out-prefix", tmp_path / "g") == 0
        assert np.linalg.matrix_rank(read_points(tmp_path / "g.csv").points) == 3

    def test_subspace(self, fixtures, tmp_path, capsys):
        prefix = tmp_path / "sub"
        with pytest.warns(UserWarning):
            code = run_cli("subspace", "--input", fixtures / "coord_subspace.csv", "--gamma", "0.1",
                           "--eps", "0.1", "--restarts", "1", "--out-prefix", prefix)
        assert code == 0
        basis = read_points(f"{prefix}.basis.csv").points
        dist = read_points(f"{prefix}.distances.csv").points
        assert basis.shape[0] <= 2 and np.all(dist <= 1e-12)
        assert "close_count: 40/40" in (tmp_path / "sub.report.txt").read_text()


def _fit_bytes(fixtures, tmp_path, name, threads=None, env=None):
    out = tmp_path / name
    flags = [f for f in PLANTED_FIT_FLAGS]
    i = flags.index("--threads")
    del flags[i:i + 2]
    if threads is not None:
        flags += ["--threads", str(threads)]
    cmd = [sys.executable, "-m", "robust_ellipsoid", "fit", "--input", str(fixtures / "planted2d.csv"),
           *flags, "--out", str(out)]
    subprocess.run(cmd, check=True, capture_output=True, env={**os.environ, **(env or {})})
    return out.read_bytes()


def test_fit_bytes_independent_of_threads(fixtures, tmp_path):
    a = _fit_bytes(fixtures, tmp_path, "a.json", threads=1)
    b = _fit_bytes(fixtures, tmp_path, "b.json", threads=8)
    c = _fit_bytes(fixtures, tmp_path, "c.json", env={"ROBUST_ELLIPSOID_THREADS": "8"})
    assert a == b == c
    assert a == (fixtures / "planted2d.fit.json").read_bytes()
