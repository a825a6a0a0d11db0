"""
文件数据模型
实例文件与报告的结构, 使用 msgspec 以确保类型安全

复数编码为 [re, im], 矩阵为按行嵌套的数组
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

from msgspec import Struct

INSTANCE_SCHEMA = "pair-v1"
REPORT_SCHEMA = "report-v1"

# [re, im]
WireComplex = Tuple[float, float]
WireMatrix = List[List[WireComplex]]

CheckStatus = Literal["pass", "fail", "skip", "error"]


class PairInstance(Struct, kw_only=True):
    """交换压缩对实例"""
    schema: Literal["pair-v1"] = INSTANCE_SCHEMA
    dim: int
    t1: WireMatrix
    t2: WireMatrix
    seed: Optional[int] = None
    scheme: Optional[str] = None


class ResidualRecord(Struct):
    """一项残差及其容差"""
    name: str
    value: float
    tol: float
    passed: bool


class CheckReport(Struct, kw_only=True):
    """一个实例上一个检查套件的结果"""
    suite: str
    instance: str
    index: int = 0
    status: CheckStatus = "pass"
    reason: str = ""
    residuals: List[ResidualRecord] = []
    info: Dict[str, Any] = {}


class RunSummary(Struct, kw_only=True):
    """批量验证的汇总"""
    instances: int
    checks: int
    failures: int
    skipped: int
    errors: int
    elapsed_s: float
    rss_mb: float
    cpu_count: int
    workers: int
    failures_by_suite: Dict[str, int] = {}


class Report(Struct, kw_only=True):
    """命令输出的报告"""
    schema: str = REPORT_SCHEMA
    command: str
    status: CheckStatus = "pass"
    summary: Optional[RunSummary] = None
    checks: List[CheckReport] = []
    data: Dict[str, Any] = {}
