"""
配置管理模块
"""

from .config_manager import ConfigManager
from .config_validator import ConfigTemplate, ConfigValidator, ReportFormat, RunConfig, ToleranceConfig

__all__ = [
    "ConfigManager",
    "ConfigTemplate",
    "ConfigValidator",
    "ReportFormat",
    "RunConfig",
    "ToleranceConfig",
]
