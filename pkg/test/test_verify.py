"""
检查套件与批量验证
"""

import asyncio

import pytest

from app.config.config_validator import SUITE_NAMES
from app.operators.errors import NoConvergence
from app.verify.runner import run_batch, summarize
from app.verify.suites import Instance, ResidualSheet, batch_instances, expand_suites, run_suite


def _failed(report):
    return [(rec.name, rec.value, rec.tol) for rec in report.residuals if not rec.passed]


def test_expand_suites():
    assert expand_suites("all") == list(SUITE_NAMES)
    assert expand_suites("bcl") == ["bcl"]


class TestResidualSheet:

    def test_nan_fails(self, scalar_pair):
        sheet = ResidualSheet("douglas", Instance(0, "x", scalar_pair))
        assert not sheet.add("tail", float("nan"), 1.0)
        assert sheet.finish().status == "fail"

    def test_abort_status(self, scalar_pair):
        sheet = ResidualSheet("douglas", Instance(0, "x", scalar_pair))
        report = sheet.abort(NoConvergence("未收敛"))
        assert report.status == "fail"
        assert "NoConvergence" in report.reason

    def test_abort_unexpected_error(self, scalar_pair):
        sheet = ResidualSheet("douglas", Instance(0, "x", scalar_pair))
        assert sheet.abort(RuntimeError("boom")).status == "error"


class TestSuites:

    @pytest.mark.parametrize("suite", SUITE_NAMES)
    def test_scalar_pair_passes(self, suite, scalar_pair, run_config):
        report = run_suite(suite, Instance(0, "scalar", scalar_pair), run_config)
        assert report.status == "pass", (report.reason, _failed(report))
        assert report.residuals

    @pytest.mark.parametrize("suite", SUITE_NAMES)
    def test_nilpotent_pair_passes(self, suite, nilpotent_pair, run_config):
        report = run_suite(suite, Instance(0, "nilpotent", nilpotent_pair), run_config)
        assert report.status == "pass", (report.reason, _failed(report))

    def test_model_skips_unitary_part(self, unitary_pair, run_config):
        report = run_suite("model", Instance(0, "unitary", unitary_pair), run_config)
        assert report.status == "skip"
        assert "纯" in report.reason

    @pytest.mark.parametrize("suite", ["schaffer", "douglas"])
    def test_unitary_pair_passes(self, suite, unitary_pair, run_config):
        report = run_suite(suite, Instance(0, "unitary", unitary_pair), run_config)
        assert report.status == "pass", (report.reason, _failed(report))

    def test_scalar_uniqueness_residual(self, scalar_pair, run_config):
        report = run_suite("uniqueness", Instance(0, "scalar", scalar_pair), run_config)
        omega = next(rec for rec in report.residuals if rec.name == "omega_intertwining")
        assert omega.value <= 1e-8

    def test_schaffer_notes(self, scalar_pair, run_config):
        report = run_suite("schaffer", Instance(0, "scalar", scalar_pair), run_config)
        assert report.info["dim_f"] == 2
        assert report.info["dim_defect"] == 1
        assert report.info["phi_sup"] == pytest.approx(0.8, abs=1e-9)

    @pytest.mark.parametrize("seed", range(4))
    def test_bcl_shift_ranks_asserted(self, seed, scalar_pair, run_config):
        report = run_suite("bcl", Instance(0, "scalar", scalar_pair, seed=seed), run_config)
        records = {rec.name: rec for rec in report.residuals}
        gap = records["shift_defect_rank_gap"]
        assert gap.value == 0.0
        assert gap.tol == 0.0
        assert gap.passed
        assert records["shift_pi_tilde_rank_gap"].passed
        assert report.info["shift_defect_rank"] == 2
        assert report.status == "pass", _failed(report)

    def test_model_scalar_residuals(self, scalar_pair, run_config):
        report = run_suite("model", Instance(0, "scalar", scalar_pair, seed=3), run_config)
        names = {rec.name for rec in report.residuals}
        assert {"intertwine_1", "coincidence", "admissible_invariance_phi", "innerness_deficit"} <= names
        assert report.status == "pass", _failed(report)


class TestBatch:

    def test_instances_are_seeded(self):
        instances = batch_instances(4, 3, 10)
        assert [inst.seed for inst in instances] == [10, 11, 12, 13]
        assert "poly_in_one_matrix" in instances[0].label
        assert "diagonal_plus_rotation" in instances[1].label

    def test_fixed_scheme(self):
        instances = batch_instances(2, 2, 0, "diag")
        assert all("diagonal_plus_rotation" in inst.label for inst in instances)

    def test_random_batch_passes(self, run_config):
        instances = batch_instances(4, 3, 1)
        checks, summary = asyncio.run(run_batch(instances, list(SUITE_NAMES), run_config))
        assert summary.instances == 4
        assert summary.checks == 4 * len(SUITE_NAMES)
        assert [(c.index, c.suite) for c in checks][:2] == [(0, "schaffer"), (0, "douglas")]
        bad = [(c.instance, c.suite, c.reason, _failed(c)) for c in checks if c.status in ("fail", "error")]
        assert not bad
        assert summary.failures == summary.errors == 0

    def test_summary_counts(self, scalar_pair, unitary_pair, run_config):
        checks = [
            run_suite("model", Instance(0, "scalar", scalar_pair), run_config),
            run_suite("model", Instance(1, "unitary", unitary_pair), run_config),
        ]
        summary = summarize(checks, 2, run_config.workers, 0.1)
        assert summary.skipped == 1
        assert summary.failures == 0
        assert summary.failures_by_suite == {"model": 0}
        assert summary.rss_mb > 0
        assert summary.cpu_count >= 1
