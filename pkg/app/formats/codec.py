"""
编解码
实例文件的读写, 报告的 JSON 与文本渲染, 以及 CSV 绘图数据
"""

import csv
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import msgspec
import numpy as np

from ..operators.errors import InstanceFormatError
from ..operators.pairs import PAIR_TOL, CommutingPair, validate_pair
from .models import INSTANCE_SCHEMA, CheckReport, PairInstance, Report, WireMatrix

logger = logging.getLogger("Dilato.IO")

PathLike = Union[str, Path]

STATUS_MARKS = {
    "pass": "✅",
    "fail": "❌",
    "skip": "⚠️",
    "error": "❌",
}


def matrix_to_wire(m: np.ndarray) -> WireMatrix:
    """复矩阵 -> 按行嵌套的 [re, im] 数组"""
    m = np.asarray(m, dtype=np.complex128)
    return [[(float(z.real), float(z.imag)) for z in row] for row in m]


def matrix_from_wire(rows: WireMatrix, name: str = "matrix") -> np.ndarray:
    """
    按行嵌套的 [re, im] 数组 -> 复矩阵

    Raises:
        InstanceFormatError: 行长度不一致
    """
    if not rows:
        return np.zeros((0, 0), dtype=np.complex128)
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise InstanceFormatError(f"{name} 的各行长度不一致")
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128).reshape(
        len(rows), width
    )


def pair_to_instance(pair: CommutingPair, seed: Optional[int] = None, scheme: Optional[str] = None) -> PairInstance:
    return PairInstance(
        dim=pair.dim,
        t1=matrix_to_wire(pair.t1),
        t2=matrix_to_wire(pair.t2),
        seed=seed,
        scheme=scheme,
    )


def instance_to_pair(
    instance: PairInstance,
    commute_tol: float = PAIR_TOL,
    contraction_tol: float = PAIR_TOL,
) -> CommutingPair:
    """
    由实例还原交换压缩对, 并按给定容差重新验证

    Raises:
        InstanceFormatError: 矩阵形状与 dim 不符
        NotCommuting, NotContraction, NonFiniteMatrix: 由 validate_pair 抛出
    """
    t1 = matrix_from_wire(instance.t1, "t1")
    t2 = matrix_from_wire(instance.t2, "t2")
    expected = (instance.dim, instance.dim)
    for name, m in (("t1", t1), ("t2", t2)):
        if m.shape != expected:
            raise InstanceFormatError(f"{name} 的形状 {m.shape} 与 dim = {instance.dim} 不符")
    return validate_pair(t1, t2, tol=commute_tol, contraction_tol=contraction_tol)


def encode_instance(instance: PairInstance) -> bytes:
    """确定性编码: 相同实例得到逐字节相同的输出"""
    return msgspec.json.format(msgspec.json.encode(instance), indent=2) + b"\n"


def decode_instance(raw: bytes) -> PairInstance:
    try:
        return msgspec.json.decode(raw, type=PairInstance)
    except msgspec.ValidationError as e:
        raise InstanceFormatError(f"实例文件不符合 {INSTANCE_SCHEMA}: {e}")
    except msgspec.DecodeError as e:
        raise InstanceFormatError(f"实例文件不是有效的 JSON: {e}")


def save_instance(
    path: PathLike,
    pair: CommutingPair,
    seed: Optional[int] = None,
    scheme: Optional[str] = None,
) -> Path:
    path = Path(path)
    try:
        if path.parent != Path("."):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(encode_instance(pair_to_instance(pair, seed, scheme)))
    except OSError as e:
        raise InstanceFormatError(f"无法写入实例文件 {path}: {e}")
    logger.debug(f"已写入实例文件: {path} (dim = {pair.dim})")
    return path


def load_instance(
    path: PathLike,
    commute_tol: float = PAIR_TOL,
    contraction_tol: float = PAIR_TOL,
) -> CommutingPair:
    """
    读取并验证实例文件

    Raises:
        InstanceFormatError: 文件不可读或格式错误
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise InstanceFormatError(f"无法读取实例文件 {path}: {e}")
    pair = instance_to_pair(decode_instance(raw), commute_tol, contraction_tol)
    logger.debug(f"已读取实例文件: {path} (dim = {pair.dim})")
    return pair


def encode_report(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        return msgspec.json.format(msgspec.json.encode(report), indent=2) + b"\n"
    return (render_text(report) + "\n").encode("utf-8")


def _check_lines(check: CheckReport) -> List[str]:
    mark = STATUS_MARKS.get(check.status, "ℹ️")
    head = f"{mark} [{check.suite}] {check.instance}"
    if check.reason:
        head += f": {check.reason}"
    lines = [head]
    for rec in check.residuals:
        sub = "✅" if rec.passed else "❌"
        lines.append(f"    {sub} {rec.name} = {rec.value:.3e} (容差 {rec.tol:.0e})")
    for key, value in check.info.items():
        if isinstance(value, (str, int, float, bool)):
            lines.append(f"    ℹ️ {key}: {value}")
    return lines


def render_text(report: Report) -> str:
    """文本报告: 每项残差一行, 附容差"""
    lines = [f"{STATUS_MARKS.get(report.status, 'ℹ️')} dilato {report.command}"]
    if report.summary is not None:
        s = report.summary
        lines.append(
            f"ℹ️ 实例 {s.instances}, 检查 {s.checks}, 失败 {s.failures}, 跳过 {s.skipped}, 错误 {s.errors}, "
            f"耗时 {s.elapsed_s:.2f}s, 内存 {s.rss_mb:.1f}MB, CPU {s.cpu_count}, 并发 {s.workers}"
        )
        for suite, count in sorted(s.failures_by_suite.items()):
            if count:
                lines.append(f"❌ 套件 {suite} 失败 {count} 项")
    for check in report.checks:
        lines.extend(_check_lines(check))
    for key, value in report.data.items():
        if isinstance(value, (str, int, float, bool)):
            lines.append(f"ℹ️ {key}: {value}")
    return "\n".join(lines)


def write_output(data: bytes, path: Optional[PathLike] = None) -> None:
    """写入文件; 未给定路径时写到标准输出"""
    if path is None:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
        return
    path = Path(path)
    try:
        if path.parent != Path("."):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(data)
    except OSError as e:
        raise InstanceFormatError(f"无法写入输出文件 {path}: {e}")
    logger.debug(f"已写入报告: {path}")


def write_plot_csv(path: PathLike, thetas: Sequence[float], svals: Iterable[Sequence[float]]) -> Path:
    """写出 theta,sigma_0,...,sigma_{k-1} 表"""
    path = Path(path)
    rows = [list(row) for row in svals]
    width = len(rows[0]) if rows else 0
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(["theta"] + [f"sigma_{i}" for i in range(width)])
            for theta, row in zip(thetas, rows):
                writer.writerow([repr(float(theta))] + [repr(float(s)) for s in row])
    except OSError as e:
        raise InstanceFormatError(f"无法写入绘图数据 {path}: {e}")
    logger.debug(f"已写入绘图数据: {path} ({len(rows)} 行)")
    return path
