"""
配置管理器与配置验证器
"""

import json

import pytest

from app.config import ConfigManager, ConfigTemplate, ConfigValidator, ReportFormat, RunConfig
from app.operators.errors import InvalidConfig


class TestConfigValidator:

    def test_default_config_is_valid(self):
        ok, errors = ConfigValidator.validate_global_config(ConfigTemplate.get_default_global_config())
        assert ok, errors

    def test_missing_field(self):
        config = ConfigTemplate.get_default_global_config()
        del config["asymptotic"]
        ok, errors = ConfigValidator.validate_global_config(config)
        assert not ok
        assert any("asymptotic" in e for e in errors)

    @pytest.mark.parametrize(
        "patch",
        [
            {"degree": {"default": 1, "max": 256}},
            {"degree": {"default": 64, "max": 32}},
            {"tolerances": {"unknown": 1e-9}},
            {"tolerances": {"rank": 1e-10}},
            {"tolerances": {"model": -1.0}},
            {"asymptotic": {"tol": 0, "max_iter": 64}},
            {"grid": 32},
            {"workers": 0},
            {"logging": {"level": "LOUD"}},
        ],
    )
    def test_invalid_values(self, patch):
        config = ConfigTemplate.get_default_global_config()
        config.update(patch)
        ok, errors = ConfigValidator.validate_global_config(config)
        assert not ok
        assert errors


class TestConfigManager:

    def test_defaults_without_file(self, workdir):
        config = ConfigManager().load()
        assert config["degree"]["default"] == 16
        assert config["tolerances"]["douglas"] == 1e-9

    def test_file_is_merged(self, workdir):
        path = workdir / "custom.json"
        path.write_text(json.dumps({"tolerances": {"model": 1e-6}, "workers": 2}), encoding="utf-8")
        config = ConfigManager().load(str(path))
        assert config["tolerances"]["model"] == 1e-6
        assert config["tolerances"]["identity"] == 1e-10
        assert config["workers"] == 2

    def test_default_location(self, workdir):
        (workdir / "config").mkdir()
        (workdir / "config" / "dilato.json").write_text(json.dumps({"grid": 128}), encoding="utf-8")
        assert ConfigManager().load()["grid"] == 128

    def test_corrupted_file_is_backed_up(self, workdir):
        path = workdir / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        config = ConfigManager().load(str(path))
        assert config["degree"]["default"] == 16
        assert (workdir / "broken.json.old").exists()

    def test_missing_explicit_file(self, workdir):
        with pytest.raises(InvalidConfig):
            ConfigManager().load(str(workdir / "missing.json"))

    def test_invalid_file_content(self, workdir):
        path = workdir / "bad.json"
        path.write_text(json.dumps({"grid": 8}), encoding="utf-8")
        with pytest.raises(InvalidConfig) as info:
            ConfigManager().load(str(path))
        assert info.value.exit_code == 2

    def test_degree_from_environment(self, workdir, monkeypatch):
        monkeypatch.setenv("DILATO_DEFAULT_N", "24")
        manager = ConfigManager()
        assert manager.load()["degree"]["default"] == 24
        assert manager.build_run_config("dilate", {}).degree_bound == 24

    def test_bad_environment_value(self, workdir, monkeypatch):
        monkeypatch.setenv("DILATO_DEFAULT_N", "sixteen")
        with pytest.raises(InvalidConfig):
            ConfigManager().load()

    def test_tol_overrides_every_tolerance(self, workdir):
        config = ConfigManager().build_run_config("verify", {"tol": 1e-6, "degree_bound": None})
        assert config.degree_bound == 16
        assert config.tolerances.model == 1e-6
        assert config.tolerances.bookkeeping == 1e-6
        assert config.tolerances.commute == 1e-6
        assert config.tolerances.contraction == 1e-6
        assert "rank" not in config.tolerances.model_dump()

    def test_cli_values_override(self, workdir):
        config = ConfigManager().build_run_config(
            "verify", {"degree_bound": 12, "suite": "model", "report_format": "text", "workers": 1}
        )
        assert config.degree_bound == 12
        assert config.suite == "model"
        assert config.report_format is ReportFormat.TEXT
        assert config.workers == 1

    @pytest.mark.parametrize(
        "overrides",
        [
            {"degree_bound": 1},
            {"suite": "everything"},
            {"model": "sz-nagy"},
            {"scheme": "toeplitz"},
            {"tol": -1.0},
        ],
    )
    def test_invalid_overrides(self, workdir, overrides):
        with pytest.raises(InvalidConfig):
            ConfigManager().build_run_config("verify", overrides)


def test_run_config_defaults():
    config = RunConfig(command="generate")
    assert config.degree_bound == 16
    assert config.max_degree == 256
    assert config.report_format is ReportFormat.JSON
    assert config.tolerances.gram == 1e-8
