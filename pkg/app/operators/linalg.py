"""
稠密复矩阵内核
提供所有上层模块使用的分解与算子论基本运算

约定:
- 所有矩阵均为 complex128 的二维 numpy 数组
- 0 维子空间用形状为 (n, 0) 的空矩阵表示, 下游运算全部接受空块
- 计算出的基向量统一采用符号约定: 每列第一个非零坐标为正实数
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .errors import (
    DimensionMismatch,
    InvalidConfig,
    NegativeEigenvalue,
    NonFiniteMatrix,
    NotHermitian,
    NotIsometric,
    ShapeMismatch,
)

logger = logging.getLogger("Dilato.Construct")

RANK_TOL = 1e-10
ORTHONORMAL_TOL = 1e-12
ISOMETRY_TOL = 1e-10
# 符号约定中 "非零" 的判定阈值
_SIGN_EPS = 1e-12


def as_cmat(m, name: str = "matrix") -> np.ndarray:
    """转换为二维复矩阵并检查有限性"""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} 必须是二维矩阵, 实际维数 {arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteMatrix(f"{name} 含有 NaN 或 Inf")
    return arr


def op_norm(m: np.ndarray) -> float:
    """谱范数, 空矩阵为 0"""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def adjoint(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def spectral_radius(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(scipy.linalg.eigvals(m))))


@dataclass
class SubspaceBasis:
    """子空间的标准正交基"""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        if self.basis.shape[0] != self.ambient_dim:
            raise ShapeMismatch(
                f"基矩阵行数 {self.basis.shape[0]} 与外围维数 {self.ambient_dim} 不一致"
            )
        gram_residual = op_norm(adjoint(self.basis) @ self.basis - np.eye(self.dim))
        if gram_residual > ORTHONORMAL_TOL:
            raise NotIsometric("基向量不是标准正交的", residual=gram_residual)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    def projector(self) -> np.ndarray:
        return self.basis @ adjoint(self.basis)

    def complement(self) -> "SubspaceBasis":
        """正交补的标准基(同样的符号约定)"""
        return range_basis(np.eye(self.ambient_dim) - self.projector())

    @classmethod
    def empty(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=np.complex128))


def _normalize_signs(cols: np.ndarray) -> np.ndarray:
    """令每列第一个非零坐标为正实数"""
    out = cols.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > _SIGN_EPS)
        if idx.size == 0:
            continue
        lead = col[idx[0]]
        out[:, j] = col * (np.conj(lead) / abs(lead))
    return out


def psd_sqrt(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """
    半正定矩阵的平方根

    Args:
        m: Hermite 半正定方阵
        tol: Hermite 性与负特征值的容差

    Returns:
        Hermite 半正定矩阵 s, 满足 s @ s = m (区间 [-tol, 0) 内的负特征值置零)

    Raises:
        NotHermitian: m 与 m^H 的差超过 tol
        NegativeEigenvalue: 最小特征值小于 -tol
    """
    m = as_cmat(m, "m")
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatch(f"psd_sqrt 需要方阵, 实际形状 {m.shape}")
    if m.size == 0:
        return m.copy()

    skew = op_norm(m - adjoint(m))
    if skew > tol:
        raise NotHermitian("矩阵不是 Hermite 的", residual=skew)

    evals, evecs = scipy.linalg.eigh((m + adjoint(m)) / 2)
    if evals[0] < -tol:
        raise NegativeEigenvalue(f"最小特征值 {evals[0]:.3e} 小于 -{tol:.1e}", residual=-evals[0])

    roots = np.sqrt(np.clip(evals, 0.0, None))
    s = (evecs * roots) @ adjoint(evecs)
    return (s + adjoint(s)) / 2


def range_basis(m: np.ndarray, rank_tol: float = RANK_TOL, abs_tol: float = 0.0) -> SubspaceBasis:
    """
    列空间的标准正交基

    秩 = 大于 rank_tol * sigma_max (且大于 abs_tol) 的奇异值个数; 全零矩阵秩为 0
    """
    m = as_cmat(m, "m")
    ambient = m.shape[0]
    if m.size == 0:
        return SubspaceBasis.empty(ambient)

    u, s, _ = scipy.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return SubspaceBasis.empty(ambient)

    cutoff = max(rank_tol * s[0], abs_tol)
    rank = int(np.count_nonzero(s > cutoff))
    return SubspaceBasis(ambient, _normalize_signs(u[:, :rank]))


def unitary_completion(
    v: np.ndarray,
    dom: SubspaceBasis,
    ran: SubspaceBasis,
    complement: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    将 dom -> ran 的等距扩张为外围空间上的酉矩阵

    Args:
        v: ran.dim x dom.dim 坐标矩阵, 第 j 列是 dom 第 j 个基向量的像在 ran 基下的坐标
        dom: 定义域子空间
        ran: 值域子空间
        complement: 可选, dom 正交补到 ran 正交补的酉矩阵(坐标); 缺省时按基的顺序一一对应

    Returns:
        外围空间上的酉矩阵 u, 在 dom 上与 v 一致

    Raises:
        DimensionMismatch: dom 与 ran 维数或外围维数不同
        NotIsometric: v^H v 偏离单位阵超过 1e-10
    """
    if dom.ambient_dim != ran.ambient_dim:
        raise DimensionMismatch(f"外围维数不同: {dom.ambient_dim} 与 {ran.ambient_dim}")
    if dom.dim != ran.dim:
        raise DimensionMismatch(f"定义域维数 {dom.dim} 与值域维数 {ran.dim} 不同")

    v = as_cmat(v, "v").reshape(ran.dim, dom.dim)
    residual = op_norm(adjoint(v) @ v - np.eye(dom.dim))
    if residual > ISOMETRY_TOL:
        raise NotIsometric("v 在 dom 上不是等距", residual=residual)

    dom_perp = dom.complement()
    ran_perp = ran.complement()
    if dom_perp.dim != ran_perp.dim:
        raise DimensionMismatch(f"正交补维数不同: {dom_perp.dim} 与 {ran_perp.dim}")

    if complement is None:
        complement = np.eye(dom_perp.dim, dtype=np.complex128)
    else:
        complement = as_cmat(complement, "complement")
        if complement.shape != (ran_perp.dim, dom_perp.dim):
            raise ShapeMismatch(f"补空间酉矩阵形状应为 {(ran_perp.dim, dom_perp.dim)}")

    return ran.basis @ v @ adjoint(dom.basis) + ran_perp.basis @ complement @ adjoint(dom_perp.basis)


def _refined_max(f, grid: int) -> float:
    """在等距网格上取最大值, 再在最优格点附近做一次有界一维优化"""
    thetas = np.arange(grid) * (2 * np.pi / grid)
    values = np.array([f(t) for t in thetas])
    best = int(np.argmax(values))
    h = 2 * np.pi / grid
    res = minimize_scalar(
        lambda t: -f(t),
        bounds=(thetas[best] - h, thetas[best] + h),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(max(values[best], -res.fun))


def numerical_radius(m: np.ndarray, grid: int = 256) -> float:
    """
    数值半径 w(m) = max_theta lambda_max((e^{i theta} m + e^{-i theta} m^H) / 2)
    """
    if grid < 64:
        raise InvalidConfig(f"网格点数至少为 64, 实际 {grid}")
    m = as_cmat(m, "m")
    if m.size == 0:
        return 0.0

    mh = adjoint(m)

    def top_eig(theta: float) -> float:
        z = np.exp(1j * theta)
        h = (z * m + np.conj(z) * mh) / 2
        return float(scipy.linalg.eigvalsh((h + adjoint(h)) / 2)[-1])

    return max(0.0, _refined_max(top_eig, grid))


def pencil_sup_norm(a: np.ndarray, b: np.ndarray, grid: int = 256) -> float:
    """单位圆上 ||a + e^{i theta} b|| 的最大值"""
    if grid < 64:
        raise InvalidConfig(f"网格点数至少为 64, 实际 {grid}")
    a = as_cmat(a, "a")
    b = as_cmat(b, "b")
    if a.shape != b.shape:
        raise ShapeMismatch(f"线性束系数形状不同: {a.shape} 与 {b.shape}")
    if a.size == 0:
        return 0.0

    return _refined_max(lambda t: op_norm(a + np.exp(1j * t) * b), grid)


def polar_parts(m: np.ndarray, rank_tol: float = RANK_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """
    极分解 m = w @ p

    Returns:
        (w, p): w 是在 ker(m) 上为零的部分等距, p = psd_sqrt(m^H m)
    """
    m = as_cmat(m, "m")
    rows, cols = m.shape
    if m.size == 0:
        return np.zeros((rows, cols), dtype=np.complex128), np.zeros((cols, cols), dtype=np.complex128)

    u, s, vh = scipy.linalg.svd(m, full_matrices=False)
    rank = int(np.count_nonzero(s > rank_tol * s[0])) if s[0] > 0 else 0
    w = u[:, :rank] @ vh[:rank, :]
    p = (adjoint(vh) * s) @ vh
    return w, (p + adjoint(p)) / 2


def crandn(size, rng: np.random.Generator) -> np.ndarray:
    """标准复正态分布样本"""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar 分布的随机酉矩阵(QR 分解并修正对角相位)"""
    if dim == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    q, r = scipy.linalg.qr(crandn((dim, dim), rng))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases
