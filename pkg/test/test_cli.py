"""
命令行入口的端到端测试

在进程内调用 run_cli, 全局参数放在指令之前, 不写日志文件
"""

import json

import numpy as np
import pytest

from app.__main__ import run_cli
from app.formats.codec import matrix_to_wire, save_instance
from app.operators.linalg import random_unitary
from app.operators.pairs import CommutingPair, random_pair, random_unitary_pair, validate_pair


def cli(*args):
    return run_cli(["--no-log-file", *args])


def read_report(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def scalar_file(workdir):
    return str(save_instance(workdir / "scalar.json", validate_pair([[0.5]], [[0.5]])))


class TestGlobalFlags:

    def test_version(self, workdir, capsys):
        assert cli("--version") == 0
        assert "dilato" in capsys.readouterr().out

    def test_no_command(self, workdir):
        assert cli() == 2

    def test_unknown_command(self, workdir):
        assert cli("dilute") == 2

    def test_command_help(self, workdir, capsys):
        assert cli("dilate", "-h") == 0
        assert "dilate" in capsys.readouterr().out

    def test_missing_config(self, workdir):
        assert run_cli(["--config", "nowhere.json", "--no-log-file", "generate"]) == 2

    def test_no_log_directory(self, workdir):
        assert cli("generate", "--dim", "2", "--out", "a.json") == 0
        assert not (workdir / "logs").exists()


class TestGenerate:

    def test_deterministic(self, workdir):
        assert cli("generate", "--dim", "3", "--seed", "7", "--out", "a.json") == 0
        assert cli("gen", "--dim", "3", "--seed", "7", "--out", "b.json") == 0
        assert (workdir / "a.json").read_bytes() == (workdir / "b.json").read_bytes()

    def test_dimension_one(self, workdir):
        assert cli("generate", "--dim", "1", "--seed", "3", "--out", "one.json") == 0
        data = read_report(workdir / "one.json")
        assert data["schema"] == "pair-v1"
        assert data["dim"] == 1

    def test_stdout(self, workdir, capsys):
        assert cli("generate", "--dim", "2", "--scheme", "diag") == 0
        data = json.loads(capsys.readouterr().out)
        assert len(data["t1"]) == 2

    def test_unknown_scheme(self, workdir):
        assert cli("generate", "--scheme", "toeplitz") == 2


class TestDilate:

    def test_schaffer(self, scalar_file, workdir):
        assert cli("dilate", scalar_file, "--model", "schaffer", "-N", "12", "--out", "r.json") == 0
        report = read_report(workdir / "r.json")
        assert report["status"] == "pass"
        assert report["data"]["degree"] == 12
        assert report["data"]["space_dim"] == 1 + 12 * 2
        assert len(report["data"]["v1"]) == 25

    def test_douglas_on_unitaries(self, workdir):
        path = save_instance(workdir / "u.json", random_unitary_pair(2, seed=3))
        assert cli("dil", str(path), "--model", "douglas", "--out", "r.json") == 0
        report = read_report(workdir / "r.json")
        assert report["data"]["hardy_dim"] == 0
        assert report["data"]["space_dim"] == 2

    def test_text_format(self, scalar_file, workdir):
        assert cli("dilate", scalar_file, "--format", "text", "--out", "r.txt") == 0
        assert "✅" in (workdir / "r.txt").read_text(encoding="utf-8")

    def test_non_commuting_file(self, workdir):
        t1 = matrix_to_wire(np.diag([1.0, 0.0]))
        t2 = matrix_to_wire(np.array([[0.0, 1.0], [0.0, 0.0]]))
        (workdir / "nc.json").write_text(
            json.dumps({"schema": "pair-v1", "dim": 2, "t1": t1, "t2": t2}), encoding="utf-8"
        )
        assert cli("dilate", "nc.json") == 2

    def test_unknown_model(self, scalar_file):
        assert cli("dilate", scalar_file, "--model", "sz-nagy") == 2

    def test_missing_input(self, workdir):
        assert cli("dilate", "nowhere.json") == 2


class TestVerify:

    def test_model_skips_unitaries(self, workdir):
        path = save_instance(workdir / "u.json", random_unitary_pair(2, seed=5))
        assert cli("verify", str(path), "--suite", "model", "--out", "r.json") == 0
        report = read_report(workdir / "r.json")
        assert report["status"] == "skip"
        assert report["summary"]["skipped"] == 1

    def test_uniqueness_on_scalar(self, scalar_file, workdir):
        assert cli("check", scalar_file, "--suite", "uniqueness", "--out", "r.json") == 0
        report = read_report(workdir / "r.json")
        assert report["status"] == "pass"
        assert report["checks"][0]["suite"] == "uniqueness"

    def test_random_batch(self, workdir):
        code = cli("verify", "--random", "2", "--dim", "2", "--seed", "4", "--suite", "douglas", "--workers", "2",
                   "--out", "r.json")
        assert code == 0
        report = read_report(workdir / "r.json")
        assert report["summary"]["instances"] == 2
        assert [c["index"] for c in report["checks"]] == [0, 1]

    def test_compare_unrelated(self, workdir):
        save_instance(workdir / "a.json", random_pair(3, 7, max_spectral_radius=0.9))
        save_instance(workdir / "b.json", random_pair(3, 8, max_spectral_radius=0.9))
        assert cli("char", "--compare", "a.json", "b.json", "--out", "r.json") == 0
        check = read_report(workdir / "r.json")["checks"][0]
        assert check["info"]["found"] is False
        assert check["info"]["outcome"] == "not found"
        assert check["reason"]
        assert check["residuals"] == []

    def test_tol_relaxes_input_validation(self, workdir):
        # ||[T1, T2]|| = 2e-9
        near = CommutingPair(np.diag([0.5, 0.3]), np.array([[0.4, 1e-8], [0.0, 0.2]]))
        save_instance(workdir / "near.json", near)
        assert cli("char", "near.json") == 2
        assert cli("char", "near.json", "--tol", "1e-6", "--out", "r.json") == 0
        assert read_report(workdir / "r.json")["checks"][0]["info"]["pure"] is True

    def test_needs_input(self, workdir):
        assert cli("verify") == 2

    def test_unknown_suite(self, scalar_file):
        assert cli("verify", scalar_file, "--suite", "everything") == 2


class TestChar:

    def test_scalar_instance(self, scalar_file, workdir):
        assert cli("char", scalar_file, "--out", "r.json") == 0
        check = read_report(workdir / "r.json")["checks"][0]
        assert check["info"]["shape"] == [1, 1]
        assert check["info"]["pure"] is True
        re, im = check["info"]["theta_at_zero"][0][0]
        assert re == pytest.approx(-0.25, abs=1e-12)
        assert im == pytest.approx(0.0, abs=1e-12)

    def test_plot_data(self, scalar_file, workdir):
        assert cli("theta", scalar_file, "--emit-plot-data", "theta.csv", "--out", "r.json") == 0
        lines = (workdir / "theta.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "theta,sigma_0"
        assert len(lines) > 2

    def test_compare_conjugates(self, workdir, poly_pair):
        omega = random_unitary(poly_pair.dim, np.random.default_rng(4))
        save_instance(workdir / "a.json", poly_pair)
        save_instance(workdir / "b.json", poly_pair.conjugated(omega))
        assert cli("char", "--compare", "a.json", "b.json", "--tol", "1e-8", "--out", "r.json") == 0
        check = read_report(workdir / "r.json")["checks"][0]
        assert check["info"]["found"] is True
        assert check["residuals"][0]["passed"] is True

    def test_needs_input(self, workdir):
        assert cli("char") == 2
