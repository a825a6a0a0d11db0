"""
实例文件与报告的编解码
"""

import csv
import json

import msgspec
import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.formats.codec import (
    decode_instance,
    encode_instance,
    encode_report,
    load_instance,
    matrix_from_wire,
    matrix_to_wire,
    pair_to_instance,
    render_text,
    save_instance,
    write_plot_csv,
)
from app.formats.models import CheckReport, Report, ResidualRecord, RunSummary
from app.operators.errors import InstanceFormatError, NotCommuting, NotContraction


def _instance_json(t1, t2, dim, schema="pair-v1"):
    return json.dumps(
        {"schema": schema, "dim": dim, "t1": matrix_to_wire(np.array(t1)), "t2": matrix_to_wire(np.array(t2))}
    ).encode("utf-8")


class TestWireMatrix:

    def test_complex_entries(self):
        m = np.array([[1 + 2j, 0], [0.5, -1j]])
        wire = matrix_to_wire(m)
        assert wire[0][0] == (1.0, 2.0)
        assert wire[1][1] == (0.0, -1.0)
        assert_array_equal(matrix_from_wire(wire), m)

    def test_ragged_rows(self):
        with pytest.raises(InstanceFormatError):
            matrix_from_wire([[(1.0, 0.0), (0.0, 0.0)], [(1.0, 0.0)]])


class TestInstanceFile:

    def test_encoding_is_deterministic(self, poly_pair):
        a = encode_instance(pair_to_instance(poly_pair, seed=7, scheme="poly_in_one_matrix"))
        b = encode_instance(pair_to_instance(poly_pair, seed=7, scheme="poly_in_one_matrix"))
        assert a == b
        assert json.loads(a)["schema"] == "pair-v1"

    def test_save_and_load(self, tmp_path, poly_pair):
        path = save_instance(tmp_path / "inst.json", poly_pair, seed=7)
        loaded = load_instance(path)
        assert_allclose(loaded.t1, poly_pair.t1, atol=0)
        assert_allclose(loaded.t2, poly_pair.t2, atol=0)

    def test_wrong_schema(self):
        with pytest.raises(InstanceFormatError):
            decode_instance(_instance_json([[0.5]], [[0.5]], 1, schema="pair-v2"))

    def test_not_json(self):
        with pytest.raises(InstanceFormatError):
            decode_instance(b"{dim: 1")

    def test_dim_mismatch(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_bytes(_instance_json([[0.5]], [[0.5]], 2))
        with pytest.raises(InstanceFormatError):
            load_instance(path)

    def test_non_commuting_file(self, tmp_path):
        path = tmp_path / "nc.json"
        path.write_bytes(_instance_json(np.diag([1.0, 0.0]), [[0.0, 1.0], [0.0, 0.0]], 2))
        with pytest.raises(NotCommuting) as info:
            load_instance(path)
        assert info.value.exit_code == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceFormatError):
            load_instance(tmp_path / "nowhere.json")

    def test_commute_tolerance_is_configurable(self, tmp_path):
        # ||[T1, T2]|| = 2e-9
        path = tmp_path / "near.json"
        path.write_bytes(_instance_json(np.diag([0.5, 0.3]), [[0.4, 1e-8], [0.0, 0.2]], 2))
        with pytest.raises(NotCommuting):
            load_instance(path)
        pair = load_instance(path, commute_tol=1e-8)
        assert pair.commutator_residual == pytest.approx(2e-9, rel=1e-6)

    def test_contraction_tolerance_is_configurable(self, tmp_path):
        path = tmp_path / "over.json"
        path.write_bytes(_instance_json([[1.0 + 1e-9]], [[0.5]], 1))
        with pytest.raises(NotContraction):
            load_instance(path)
        with pytest.raises(NotContraction):
            load_instance(path, commute_tol=1e-6)
        pair = load_instance(path, contraction_tol=1e-8)
        assert pair.contraction_slack == pytest.approx(-1e-9, abs=1e-15)


class TestReport:

    def _report(self):
        check = CheckReport(
            suite="douglas",
            instance="seed=1",
            residuals=[ResidualRecord("x_unitarity", 1.5e-15, 1e-9, True), ResidualRecord("tail", 2e-9, 1e-10, False)],
            status="fail",
            info={"degree": 16},
        )
        summary = RunSummary(
            instances=1, checks=1, failures=1, skipped=0, errors=0,
            elapsed_s=0.5, rss_mb=80.0, cpu_count=4, workers=2,
            failures_by_suite={"douglas": 1},
        )
        return Report(command="verify", status="fail", summary=summary, checks=[check])

    def test_json_report(self):
        data = json.loads(encode_report(self._report(), "json"))
        assert data["schema"] == "report-v1"
        assert data["checks"][0]["residuals"][1]["passed"] is False
        assert data["summary"]["failures_by_suite"] == {"douglas": 1}

    def test_json_report_decodes(self):
        report = msgspec.json.decode(encode_report(self._report(), "json"), type=Report)
        assert report.checks[0].info == {"degree": 16}

    def test_text_report(self):
        text = render_text(self._report())
        assert "x_unitarity = 1.500e-15 (容差 1e-09)" in text
        assert "❌ tail" in text
        assert "套件 douglas 失败 1 项" in text
        assert encode_report(self._report(), "text").decode("utf-8").endswith("\n")


def test_plot_csv(tmp_path):
    path = write_plot_csv(tmp_path / "theta.csv", [0.0, 0.5], [[1.0, 0.5], [0.9, 0.4]])
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["theta", "sigma_0", "sigma_1"]
    assert float(rows[2][1]) == 0.9
