"""
配置验证器
验证全局配置的格式和内容, 并定义运行配置模型
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator

TOLERANCE_KEYS = (
    "commute",
    "contraction",
    "identity",
    "douglas",
    "bookkeeping",
    "tail",
    "model",
    "align",
    "gram",
)

SUITE_NAMES = ("schaffer", "douglas", "uniqueness", "model", "bcl")
SCHEME_NAMES = ("poly", "diag", "poly_in_one_matrix", "diagonal_plus_rotation")


class ConfigValidator:
    """配置验证器"""

    @staticmethod
    def validate_global_config(config: Dict[str, Any]) -> tuple[bool, List[str]]:
        """验证全局配置"""
        errors = []

        # 验证必需字段
        required_fields = {
            "degree": dict,
            "tolerances": dict,
            "asymptotic": dict,
            "grid": int,
            "workers": int,
            "logging": dict,
        }

        for field, expected_type in required_fields.items():
            if field not in config:
                errors.append(f"缺少必需字段: {field}")
            elif not isinstance(config[field], expected_type):
                errors.append(f"字段 {field} 类型错误，期望 {expected_type.__name__}")

        # 验证截断次数
        degree = config.get("degree")
        if isinstance(degree, dict):
            default = degree.get("default")
            maximum = degree.get("max")
            if not isinstance(default, int) or default < 2:
                errors.append("degree.default 必须是不小于 2 的整数")
            if not isinstance(maximum, int) or maximum < 2:
                errors.append("degree.max 必须是不小于 2 的整数")
            elif isinstance(default, int) and default > maximum:
                errors.append("degree.default 不能超过 degree.max")

        # 验证容差
        tolerances = config.get("tolerances")
        if isinstance(tolerances, dict):
            for key, value in tolerances.items():
                if key not in TOLERANCE_KEYS:
                    errors.append(f"未知的容差项: {key}")
                elif isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
                    errors.append(f"tolerances.{key} 必须是正数")

        # 验证渐近极限迭代
        asymptotic = config.get("asymptotic")
        if isinstance(asymptotic, dict):
            tol = asymptotic.get("tol")
            if isinstance(tol, bool) or not isinstance(tol, (int, float)) or tol <= 0:
                errors.append("asymptotic.tol 必须是正数")
            max_iter = asymptotic.get("max_iter")
            if not isinstance(max_iter, int) or max_iter < 1:
                errors.append("asymptotic.max_iter 必须是正整数")

        if isinstance(config.get("grid"), int) and config["grid"] < 64:
            errors.append("grid 至少为 64")

        if isinstance(config.get("workers"), int) and config["workers"] < 1:
            errors.append("workers 至少为 1")

        # 验证日志配置
        logging_config = config.get("logging")
        if isinstance(logging_config, dict):
            level = logging_config.get("level", "INFO")
            if str(level).upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
                errors.append(f"logging.level 无效: {level}")
            keep_days = logging_config.get("keep_days", 7)
            if not isinstance(keep_days, int) or keep_days < 1:
                errors.append("logging.keep_days 必须是正整数")
            if "to_file" in logging_config and not isinstance(logging_config["to_file"], bool):
                errors.append("logging.to_file 必须是布尔值")

        return len(errors) == 0, errors


class ConfigTemplate:
    """配置模板"""

    @staticmethod
    def get_default_global_config() -> Dict[str, Any]:
        """获取默认全局配置"""
        return {
            "degree": {
                "default": 16,
                "max": 256,
            },
            "tolerances": {
                "commute": 1e-10,
                "contraction": 1e-10,
                "identity": 1e-10,
                "douglas": 1e-9,
                "bookkeeping": 1e-12,
                "tail": 1e-10,
                "model": 1e-7,
                "align": 1e-7,
                "gram": 1e-8,
            },
            "asymptotic": {
                "tol": 1e-13,
                "max_iter": 64,
            },
            "grid": 256,
            "workers": 4,
            "logging": {
                "level": "INFO",
                "file_rotation": True,
                "keep_days": 7,
                "max_file_size": "10MB",
                "to_file": True,
            },
        }


class ReportFormat(str, Enum):
    """报告格式"""
    JSON = "json"
    TEXT = "text"


class ToleranceConfig(BaseModel):
    """各项检查的容差"""
    commute: float = Field(1e-10, gt=0, description="输入校验与内部子空间上的交换子容差")
    contraction: float = Field(1e-10, gt=0, description="算子范数超过 1 的允许量")
    identity: float = Field(1e-10, gt=0, description="Andô 元组, BCL 恒等式与基本方程")
    douglas: float = Field(1e-9, gt=0, description="Douglas 数据与交换关系")
    bookkeeping: float = Field(1e-12, gt=0, description="Pi_D 等距亏量的精确记账")
    tail: float = Field(1e-10, gt=0, description="||T^N T^{*N} - Q^2|| 的停止条件")
    model: float = Field(1e-7, gt=0, description="函数模型残差的基础容差")
    align: float = Field(1e-7, gt=0, description="极小膨胀对齐残差")
    gram: float = Field(1e-8, gt=0, description="Krylov Gram 矩阵的一致性")


class RunConfig(BaseModel):
    """一次命令运行的配置"""
    command: str = Field(..., description="子命令名")
    input_path: Optional[str] = Field(None, description="实例文件路径")
    seed: int = Field(0, description="随机种子")
    dim: int = Field(3, ge=1, description="随机实例维数")
    scheme: Optional[str] = Field(None, description="随机实例生成方案; 批量验证时缺省为两种方案交替")
    degree_bound: int = Field(16, description="截断次数 N")
    max_degree: int = Field(256, description="自适应倍增的上限")
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig, description="容差")
    asymptotic_tol: float = Field(1e-13, gt=0, description="渐近极限迭代的停止容差")
    asymptotic_max_iter: int = Field(64, ge=1, description="渐近极限迭代的最大加倍次数")
    grid: int = Field(256, ge=64, description="数值半径等单位圆网格点数")
    workers: int = Field(4, ge=1, description="批量验证的并发数")
    output_path: Optional[str] = Field(None, description="输出文件路径")
    report_format: ReportFormat = Field(ReportFormat.JSON, description="报告格式")
    model: str = Field("schaffer", description="dilate 使用的膨胀模型")
    suite: str = Field("all", description="verify 运行的检查套件")
    random_count: Optional[int] = Field(None, ge=1, description="随机批量实例个数")
    compare: Optional[List[str]] = Field(None, description="char --compare 的两个实例文件")
    plot_path: Optional[str] = Field(None, description="CSV 绘图数据路径")

    @field_validator("model")
    @classmethod
    def _check_model(cls, value: str) -> str:
        if value not in ("schaffer", "douglas"):
            raise ValueError(f"未知的膨胀模型: {value}")
        return value

    @field_validator("suite")
    @classmethod
    def _check_suite(cls, value: str) -> str:
        if value not in SUITE_NAMES + ("all",):
            raise ValueError(f"未知的检查套件: {value}")
        return value

    @field_validator("scheme")
    @classmethod
    def _check_scheme(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in SCHEME_NAMES:
            raise ValueError(f"未知的生成方案: {value}")
        return value

    @field_validator("degree_bound", "max_degree")
    @classmethod
    def _check_degree(cls, value: int) -> int:
        if value < 2:
            raise ValueError("截断次数至少为 2")
        return value


def format_validation_error(error: ValidationError) -> List[str]:
    """把 pydantic 的校验错误展开为逐条消息"""
    return [f"{'.'.join(str(p) for p in item['loc'])}: {item['msg']}" for item in error.errors()]
