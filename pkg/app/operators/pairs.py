"""
交换压缩对
负责矩阵对的校验, 随机生成, 亏算子以及渐近极限 Q 的计算
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import NoConvergence, NotCommuting, NotContraction, ShapeMismatch
from .linalg import (
    RANK_TOL,
    SubspaceBasis,
    adjoint,
    as_cmat,
    crandn,
    op_norm,
    psd_sqrt,
    random_unitary,
    range_basis,
    spectral_radius,
)

logger = logging.getLogger("Dilato.Construct")

PAIR_TOL = 1e-10
# D_T 奇异值低于此值视为舍入噪声 (对应 I - T^H T 的特征值约 1e-14)
DEFECT_ABS_TOL = 1e-7
# I - T^H T 允许的负特征值幅度
DEFECT_SQRT_TOL = 1e-9
# Q^2 是正交投影, 特征值非 0 即 1; 低于此值的奇异方向不计入 R = Ran Q
Q_ABS_TOL = 1e-3


class GenerationScheme(str, Enum):
    """随机实例生成方案"""
    POLY_IN_ONE_MATRIX = "poly_in_one_matrix"
    DIAGONAL_PLUS_ROTATION = "diagonal_plus_rotation"

    @classmethod
    def parse(cls, value: str) -> "GenerationScheme":
        aliases = {"poly": cls.POLY_IN_ONE_MATRIX, "diag": cls.DIAGONAL_PLUS_ROTATION}
        if value in aliases:
            return aliases[value]
        return cls(value)


@dataclass
class CommutingPair:
    """交换压缩对 (T1, T2), 以及乘积 T = T1 T2"""

    t1: np.ndarray
    t2: np.ndarray
    commutator_residual: float = 0.0
    contraction_slack: float = 0.0
    t: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.t is None:
            self.t = self.t1 @ self.t2

    @property
    def dim(self) -> int:
        return int(self.t1.shape[0])

    def adjoint(self) -> "CommutingPair":
        """伴随对 (T1^H, T2^H), 乘积取 T^H 本身以保证亏空间基一致"""
        return CommutingPair(
            adjoint(self.t1),
            adjoint(self.t2),
            self.commutator_residual,
            self.contraction_slack,
            t=adjoint(self.t),
        )

    def conjugated(self, omega: np.ndarray) -> "CommutingPair":
        """酉相似 (w T1 w^H, w T2 w^H)"""
        return validate_pair(omega @ self.t1 @ adjoint(omega), omega @ self.t2 @ adjoint(omega))


@dataclass
class DefectData:
    """
    亏算子数据

    d: D_T, basis: 亏空间的标准正交基,
    d_in_basis: h -> D_T h 在 basis 下的坐标 (basis.dim x n)
    """

    d: np.ndarray
    basis: SubspaceBasis
    d_in_basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.dim

    def compressed(self) -> np.ndarray:
        """D_T 压缩到亏空间上的方阵"""
        return self.d_in_basis @ self.basis.basis


@dataclass
class AsymptoticData:
    """渐近极限 Q^2 = lim T^n T^{*n}"""

    q: np.ndarray
    q_basis: SubspaceBasis
    iterations: int
    exponent: int
    tail_residual: float
    invariance_residual: float
    power_norm: float

    @property
    def pure(self) -> bool:
        return self.q_basis.dim == 0


def validate_pair(t1, t2, tol: float = PAIR_TOL, contraction_tol: Optional[float] = None) -> CommutingPair:
    """
    校验并构造交换压缩对

    contraction_tol 缺省与 tol 相同

    Raises:
        ShapeMismatch: 非方阵或形状不同
        NotCommuting: ||[T1, T2]|| > tol
        NotContraction: ||Ti|| > 1 + contraction_tol
    """
    if contraction_tol is None:
        contraction_tol = tol
    t1 = as_cmat(t1, "t1")
    t2 = as_cmat(t2, "t2")
    if t1.shape[0] != t1.shape[1] or t2.shape[0] != t2.shape[1]:
        raise ShapeMismatch(f"T1, T2 必须是方阵, 实际形状 {t1.shape}, {t2.shape}")
    if t1.shape != t2.shape:
        raise ShapeMismatch(f"T1 与 T2 形状不同: {t1.shape} 与 {t2.shape}")

    commutator = op_norm(t1 @ t2 - t2 @ t1)
    if commutator > tol:
        raise NotCommuting("T1 与 T2 不交换", residual=commutator)

    norm = max(op_norm(t1), op_norm(t2))
    if norm > 1 + contraction_tol:
        raise NotContraction(f"算子范数 {norm:.12f} 超过 1", residual=norm - 1)

    return CommutingPair(t1, t2, commutator_residual=commutator, contraction_slack=1.0 - norm)


def defect(t: np.ndarray) -> DefectData:
    """亏算子 D_T = (I - T^H T)^{1/2}, 及其值域的基"""
    t = as_cmat(t, "t")
    norm = op_norm(t)
    if norm > 1 + PAIR_TOL:
        raise NotContraction(f"算子范数 {norm:.12f} 超过 1", residual=norm - 1)

    n = t.shape[1]
    d = psd_sqrt(np.eye(n) - adjoint(t) @ t, tol=DEFECT_SQRT_TOL)
    basis = range_basis(d, rank_tol=RANK_TOL, abs_tol=DEFECT_ABS_TOL)
    # 丢弃舍入级别的分量, 使 d 与 basis 一致
    d = basis.projector() @ d @ basis.projector()
    d = (d + adjoint(d)) / 2
    return DefectData(d=d, basis=basis, d_in_basis=adjoint(basis.basis) @ d)


def defect_adjoint(t: np.ndarray) -> DefectData:
    """D_{T*} = (I - T T^H)^{1/2}"""
    return defect(adjoint(as_cmat(t, "t")))


def asymptotic_limit(t: np.ndarray, tol: float = 1e-13, max_iter: int = 64) -> AsymptoticData:
    """
    幂迭代 S_n = T^n T^{*n}, 指数每步加倍, 直到相邻差不超过 tol

    Raises:
        NoConvergence: 达到 max_iter 仍未收敛
    """
    t = as_cmat(t, "t")
    n = t.shape[0]
    power = t.copy()
    s = power @ adjoint(power)
    exponent = 1
    diff = np.inf

    for iteration in range(1, max_iter + 1):
        power = power @ power
        exponent *= 2
        s_next = power @ adjoint(power)
        diff = op_norm(s_next - s)
        s = s_next
        if diff <= tol:
            break
    else:
        raise NoConvergence(f"渐近极限在 {max_iter} 次加倍后未收敛", residual=diff)

    q = psd_sqrt((s + adjoint(s)) / 2, tol=1e-8)
    q_basis = range_basis(q, rank_tol=RANK_TOL, abs_tol=Q_ABS_TOL)
    q = q_basis.projector() @ q @ q_basis.projector()
    q = (q + adjoint(q)) / 2
    q2 = q @ q

    invariance = op_norm(t @ q2 @ adjoint(t) - q2)
    tail = op_norm(s - q2)
    logger.debug(f"渐近极限: 指数 2^{iteration}, rank Q = {q_basis.dim}, 尾部残差 {tail:.2e}")

    return AsymptoticData(
        q=q,
        q_basis=q_basis,
        iterations=iteration,
        exponent=exponent,
        tail_residual=tail,
        invariance_residual=invariance,
        power_norm=op_norm(power) if n else 0.0,
    )


def tail_norm(t: np.ndarray, q: np.ndarray, n: int) -> float:
    """||T^N T^{*N} - Q^2||"""
    power = np.linalg.matrix_power(t, n)
    return op_norm(power @ adjoint(power) - q @ q)


def _poly(coeffs: np.ndarray, a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(a)
    for c in coeffs[::-1]:
        out = out @ a + c * np.eye(a.shape[0])
    return out


def random_pair(
    dim: int,
    seed: int,
    scheme: GenerationScheme = GenerationScheme.POLY_IN_ONE_MATRIX,
    max_spectral_radius: Optional[float] = None,
) -> CommutingPair:
    """
    生成随机交换压缩对

    poly_in_one_matrix: 随机矩阵 A 的两个次数不超过 2 的随机多项式, 归一化后乘以 [0.3, 1] 中的半径
    diagonal_plus_rotation: 一对可交换的对角阵经同一个随机酉矩阵共轭

    max_spectral_radius 给定时, 同步缩放 T1, T2 使 T 的谱半径不超过该值(用于纯情形实例)
    """
    if dim < 1:
        raise ShapeMismatch(f"维数至少为 1, 实际 {dim}")
    scheme = GenerationScheme(scheme)
    rng = np.random.default_rng(seed)

    if scheme is GenerationScheme.POLY_IN_ONE_MATRIX:
        a = crandn((dim, dim), rng) / np.sqrt(dim)
        eps = 1e-12
        t1 = _poly(crandn(3, rng), a)
        t2 = _poly(crandn(3, rng), a)
        r1, r2 = rng.uniform(0.3, 1.0, size=2)
        t1 = t1 / (op_norm(t1) + eps) * r1
        t2 = t2 / (op_norm(t2) + eps) * r2
    else:
        omega = random_unitary(dim, rng)
        moduli = rng.uniform(0.0, 0.9, size=(2, dim))
        # 约五分之一的对角元取在单位圆上, 产生酉部分
        moduli[rng.uniform(size=(2, dim)) < 0.2] = 1.0
        phases = np.exp(2j * np.pi * rng.uniform(size=(2, dim)))
        diag = moduli * phases
        t1 = (omega * diag[0]) @ adjoint(omega)
        t2 = (omega * diag[1]) @ adjoint(omega)

    if max_spectral_radius is not None:
        rho = spectral_radius(t1 @ t2)
        if rho > max_spectral_radius:
            scale = np.sqrt(max_spectral_radius / rho)
            t1, t2 = t1 * scale, t2 * scale

    return validate_pair(t1, t2)


def random_unitary_pair(dim: int, seed: int) -> CommutingPair:
    """同一个酉矩阵对角化的一对交换酉矩阵"""
    rng = np.random.default_rng(seed)
    omega = random_unitary(dim, rng)
    phases = np.exp(2j * np.pi * rng.uniform(size=(2, dim)))
    return validate_pair((omega * phases[0]) @ adjoint(omega), (omega * phases[1]) @ adjoint(omega))
