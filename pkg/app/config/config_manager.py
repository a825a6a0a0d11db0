"""
配置管理器
负责加载全局配置, 合并环境变量与命令行参数, 并生成运行配置
"""

import json
import os
import shutil
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from ..operators.errors import InvalidConfig
from .config_validator import ConfigTemplate, ConfigValidator, RunConfig, format_validation_error

DEFAULT_CONFIG_PATH = Path("config") / "dilato.json"
DEGREE_ENV = "DILATO_DEFAULT_N"


class ConfigManager:
    """配置管理器"""

    def __init__(self):
        self._global_config: Optional[Dict[str, Any]] = None
        self._validator = ConfigValidator()
        self.logger = None

    def set_logger(self, logger):
        self.logger = logger

    def log(self, message, level="info"):
        if self.logger:
            if level == "info":
                self.logger.info(message)
            elif level == "warning":
                self.logger.warning(message)
            elif level == "error":
                self.logger.error(message)
        else:
            if level == "info":
                print(message)
            elif level == "warning":
                print(f"WARNING: {message}")
            elif level == "error":
                print(f"ERROR: {message}")

    def _backup_corrupted_config(self, config_file: Path) -> bool:
        try:
            backup_file = config_file.with_suffix('.json.old')

            if backup_file.exists():
                timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
                backup_file = config_file.with_suffix(f'.json.old.{timestamp}')

            shutil.copy2(config_file, backup_file)
            self.log(f"已备份损坏的配置文件: {config_file} -> {backup_file}", "warning")
            return True
        except Exception as e:
            self.log(f"备份配置文件失败 {config_file}: {e}", "error")
            return False

    def load(self, path: Optional[str] = None) -> Dict[str, Any]:
        """
        加载全局配置

        顺序: 默认值 -> JSON 文件(显式路径或 config/dilato.json) -> 环境变量 DILATO_DEFAULT_N

        Raises:
            InvalidConfig: 显式给出的文件不存在, 或合并后的配置未通过验证
        """
        config = ConfigTemplate.get_default_global_config()
        config_file = Path(path) if path else DEFAULT_CONFIG_PATH

        if config_file.exists():
            try:
                with open(config_file, 'r', encoding='utf-8') as f:
                    loaded_config = json.load(f)
                if not isinstance(loaded_config, dict):
                    raise ValueError("顶层必须是 JSON 对象")
                config = self._deep_merge_configs(config, loaded_config)
            except (ValueError, OSError) as e:
                self.log(f"加载配置文件失败: {e}", "warning")
                # 备份损坏的配置文件, 按默认配置继续
                self._backup_corrupted_config(config_file)
        elif path:
            raise InvalidConfig(f"配置文件不存在: {config_file}")

        env_degree = os.environ.get(DEGREE_ENV)
        if env_degree:
            try:
                config["degree"]["default"] = int(env_degree)
            except ValueError:
                raise InvalidConfig(f"环境变量 {DEGREE_ENV} 不是整数: {env_degree!r}")

        ok, errors = self._validator.validate_global_config(config)
        if not ok:
            raise InvalidConfig("配置验证失败: " + "; ".join(errors))

        self._global_config = config
        return config

    def _deep_merge_configs(self, default: dict, loaded: dict) -> dict:
        """深度合并配置，保留用户自定义值，添加缺失的新字段"""
        result = default.copy()

        for key, value in loaded.items():
            if key in result:
                # 如果都是字典，递归合并
                if isinstance(result[key], dict) and isinstance(value, dict):
                    result[key] = self._deep_merge_configs(result[key], value)
                else:
                    # 使用用户自定义的值
                    result[key] = value
            else:
                # 保留用户添加的额外字段
                result[key] = value

        return result

    @property
    def global_config(self) -> Dict[str, Any]:
        if self._global_config is None:
            return self.load()
        return self._global_config

    def build_run_config(self, command: str, overrides: Dict[str, Any]) -> RunConfig:
        """
        由全局配置与命令行参数生成运行配置; 值为 None 的参数不覆盖全局配置

        Raises:
            InvalidConfig: 截断次数小于 2, 容差非正等
        """
        config = self.global_config
        values: Dict[str, Any] = {
            "command": command,
            "degree_bound": config["degree"]["default"],
            "max_degree": config["degree"]["max"],
            "tolerances": dict(config["tolerances"]),
            "asymptotic_tol": config["asymptotic"]["tol"],
            "asymptotic_max_iter": config["asymptotic"]["max_iter"],
            "grid": config["grid"],
            "workers": config["workers"],
        }

        tol_override = overrides.pop("tol", None)
        if tol_override is not None:
            # --tol 统一覆盖所有断言容差
            values["tolerances"] = {key: tol_override for key in values["tolerances"]}

        values.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return RunConfig(**values)
        except ValidationError as e:
            raise InvalidConfig("运行配置无效: " + "; ".join(format_validation_error(e)))


