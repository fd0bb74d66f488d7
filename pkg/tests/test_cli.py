import json

import numpy as np
import pytest

from specring.cli import main
from specring.rings import ComplexMatrixRing, ComplexRing, RationalRing, element_to_json


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines()]


def write(path, ring, x):
    path.write_text(json.dumps(element_to_json(ring, x)))
    return str(path)


def result(lines):
    return next(l for l in lines if l.get("record") == "result")


@pytest.fixture
def fixture23(tmp_path, capsys):
    out = tmp_path / "q.json"
    assert main(["generate", "--n", "2", "--eig", "3,-2", "--seed", "7", "--out", str(out)]) == 0
    capsys.readouterr()
    return out


class TestCompute:
    def test_sgn_fixture(self, fixture23, capsys):
        code, lines = run(["compute", "--fn", "sgn", "--input", str(fixture23), "--nodes", "64"], capsys)
        assert code == 0
        res = result(lines)
        assert res["oracle_error"] <= 1e-8
        assert set(res) >= {"value", "residuals", "error_budget", "backend", "nodes"}

    def test_sgn_upper_triangular(self, tmp_path, capsys):
        f = write(tmp_path / "a.json", ComplexMatrixRing(2), np.array([[3.0, 1.0], [0.0, -2.0]], dtype=complex))
        code, lines = run(["compute", "--fn", "sgn", "--input", f, "--nodes", "64"], capsys)
        assert code == 0
        got = np.array([[complex(*c) for c in row] for row in np.reshape(result(lines)["value"]["data"], (2, 2, 2))])
        assert np.abs(got - np.array([[1, 0.4], [0, -1]])).max() <= 1e-8

    def test_refuted(self, tmp_path, capsys):
        f = write(tmp_path / "r.json", ComplexMatrixRing(2), np.array([[0, 1], [-1, 0]], dtype=complex))
        code, lines = run(["compute", "--fn", "sgn", "--input", f], capsys)
        assert code == 2 and lines[-1]["record"] == "refuted"

    def test_nonconverged(self, tmp_path, capsys):
        f = write(tmp_path / "s.json", ComplexRing(), complex(0.55))
        code, _ = run(["compute", "--fn", "idem", "--input", f, "--nodes", "8"], capsys)
        assert code == 3

    def test_io_errors(self, tmp_path, capsys):
        code, _ = run(["compute", "--fn", "sgn", "--input", str(tmp_path / "missing.json")], capsys)
        assert code == 1
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(["compute", "--fn", "sgn", "--input", str(bad)], capsys)[0] == 1
        assert main(["compute", "--fn", "nope", "--input", str(bad)]) == 1

    def test_geomean(self, tmp_path, capsys):
        a = write(tmp_path / "a.json", RationalRing(), 4)
        b = write(tmp_path / "b.json", RationalRing(), 9)
        code, lines = run(["compute", "--fn", "geomean", "--input", a, b, "--nodes", "128"], capsys)
        assert code == 0
        re, im = result(lines)["value"]["data"][0]
        assert abs(complex(re, im) - 6) <= 1e-8

    def test_verify_convergence_table(self, fixture23, capsys):
        code, lines = run(["compute", "--fn", "sgn", "--input", str(fixture23), "--verify"], capsys)
        assert code == 0
        nodes = [l["nodes"] for l in lines if l.get("record") == "convergence"]
        assert nodes == [32, 64, 128]

    def test_oracle_backend(self, fixture23, capsys):
        code, lines = run(["compute", "--fn", "sgn", "--input", str(fixture23), "--backend", "oracle"], capsys)
        assert code == 0 and result(lines)["oracle_error"] <= 1e-12

    def test_determinism(self, fixture23, tmp_path, capsys):
        outs = []
        for k in range(2):
            rep = tmp_path / f"rep{k}.jsonl"
            main(["compute", "--fn", "sgn", "--input", str(fixture23), "--verify", "--report", str(rep)])
            outs.append(rep.read_bytes())
        capsys.readouterr()
        assert outs[0] == outs[1]


class TestVerify:
    @pytest.mark.parametrize("suite", ["identities", "kernels", "spectral"])
    def test_suites_pass(self, suite, capsys):
        code, lines = run(["verify", "--suite", suite], capsys)
        assert code == 0 and lines[-1]["failed"] == []

    def test_halffree(self, capsys):
        code, lines = run(["verify", "--suite", "halffree"], capsys)
        assert code == 0
        table = next(l for l in lines if l.get("name") == "table")
        assert table["detail"] == "12/12 entries match"

    def test_forced_failure(self, capsys):
        code, lines = run(["verify", "--suite", "spectral", "--tol", "1e-30"], capsys)
        assert code == 4 and lines[-1]["failed"]

    def test_verify_identities(self, capsys):
        code, lines = run(["verify-identities", "--set", "all"], capsys)
        assert code == 0 and lines[-1]["total"] == len(lines) - 1


class TestGenerate:
    def test_sidecar_oracle(self, fixture23):
        side = json.loads(fixture23.with_name("q.sidecar.json").read_text())
        V = np.array(side["V"], dtype=float)
        sgn = V @ np.diag([1.0, -1.0]) @ np.linalg.inv(V)
        assert np.allclose(sgn @ sgn, np.eye(2))
        assert side["seed"] == 7

    def test_scalar(self, tmp_path, capsys):
        out = tmp_path / "nine.json"
        assert run(["generate", "--n", "1", "--eig", "9", "--out", str(out)], capsys)[0] == 0
        assert main(["compute", "--fn", "sqrt", "--input", str(out), "--nodes", "128"]) == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
        assert result(lines)["oracle_error"] <= 1e-8

    def test_idem_fixture(self, tmp_path, capsys):
        out = tmp_path / "p.json"
        code, _ = run(["generate", "--n", "4", "--eig", "0.4+0.2j,0.4-0.2j,0.6+0.2j,0.6-0.2j",
                       "--exclude", "idem", "--margin", "0.05", "--seed", "3", "--out", str(out)], capsys)
        assert code == 0
        code, lines = run(["compute", "--fn", "idem", "--input", str(out), "--nodes", "256"], capsys)
        assert code == 0 and result(lines)["oracle_error"] <= 1e-8

    def test_margin_violation(self, tmp_path, capsys):
        code, _ = run(["generate", "--eig", "0.5,2", "--exclude", "idem", "--margin", "0.1",
                       "--out", str(tmp_path / "x.json")], capsys)
        assert code == 1

    def test_deterministic(self, tmp_path, capsys):
        for k in range(2):
            main(["generate", "--eig", "1,2,3", "--seed", "11", "--out", str(tmp_path / f"g{k}.json")])
        capsys.readouterr()
        assert (tmp_path / "g0.json").read_bytes() == (tmp_path / "g1.json").read_bytes()
