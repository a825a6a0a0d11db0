"""
次数截断的向量值 Hardy 空间 H^2_N(F)
提供向量, 一次线性束乘法算子, 解析 Toeplitz 算子, 平移以及子空间投影

存储约定: 系数分块存放, 下标 n * fiber_dim + i 对应 z^n 的第 i 个坐标.
截断契约: 正向乘法只在内部子空间(最高次系数为零)上精确; 伴随在整个截断空间上精确.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import InvalidConfig, ShapeMismatch
from .linalg import RANK_TOL, adjoint, as_cmat, range_basis


class OpKind(str, Enum):
    """算子的符号结构"""
    PENCIL = "pencil"
    SHIFT = "shift"
    ANALYTIC_TOEPLITZ = "analytic_toeplitz"
    DENSE = "dense"


@dataclass
class PencilSymbol:
    """一次多项式符号 phi(z) = A + zB"""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = as_cmat(self.a, "a")
        self.b = as_cmat(self.b, "b")
        if self.a.shape != self.b.shape or self.a.shape[0] != self.a.shape[1]:
            raise ShapeMismatch(f"线性束系数必须是同形状方阵: {self.a.shape}, {self.b.shape}")

    @property
    def fiber_dim(self) -> int:
        return int(self.a.shape[0])

    def at(self, z: complex) -> np.ndarray:
        return self.a + z * self.b


@dataclass
class HardyVec:
    """截断 Hardy 空间中的向量, coeffs 形状为 (N, fiber_dim)"""

    fiber_dim: int
    degree_bound: int
    coeffs: np.ndarray

    @classmethod
    def from_flat(cls, vec: np.ndarray, fiber_dim: int) -> "HardyVec":
        vec = np.asarray(vec, dtype=np.complex128)
        n = vec.size // fiber_dim if fiber_dim else 0
        return cls(fiber_dim, n, vec.reshape(n, fiber_dim))

    def flat(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))


@dataclass
class HardyOp:
    """截断 Hardy 空间上的算子"""

    degree_bound: int
    fiber_in: int
    fiber_out: int
    kind: OpKind
    matrix: np.ndarray
    symbol: Optional[PencilSymbol] = None
    coeffs: Optional[List[np.ndarray]] = None

    @property
    def fiber_dim(self) -> int:
        return self.fiber_in

    def apply(self, vec: HardyVec) -> HardyVec:
        return HardyVec.from_flat(self.matrix @ vec.flat(), self.fiber_out)

    def adjoint(self) -> "HardyOp":
        return HardyOp(self.degree_bound, self.fiber_out, self.fiber_in, OpKind.DENSE, adjoint(self.matrix))


def _check_degree(n: int):
    if n < 2:
        raise InvalidConfig(f"截断次数至少为 2, 实际 {n}")


def lower_shift(n: int) -> np.ndarray:
    """N x N 下移矩阵"""
    return np.eye(n, k=-1, dtype=np.complex128)


def mult_op(sym: PencilSymbol, n: int) -> HardyOp:
    """
    乘法算子 M_phi, phi = A + zB

    分块下二对角: 对角块 A, 次对角块 B, 溢出到 z^N 的部分被丢弃
    """
    _check_degree(n)
    d = sym.fiber_dim
    matrix = np.kron(np.eye(n), sym.a) + np.kron(lower_shift(n), sym.b)
    return HardyOp(n, d, d, OpKind.PENCIL, matrix.astype(np.complex128), symbol=sym)


def shift(n: int, fiber_dim: int) -> HardyOp:
    """M_z"""
    sym = PencilSymbol(np.zeros((fiber_dim, fiber_dim)), np.eye(fiber_dim))
    op = mult_op(sym, n)
    op.kind = OpKind.SHIFT
    return op


def analytic_toeplitz(coeffs: Sequence[np.ndarray], n: int) -> HardyOp:
    """
    解析 Toeplitz 算子 M_Theta, Theta(z) = sum_k Theta_k z^k

    系数块形状均为 d_out x d_in; 超过 N 的系数与溢出部分被丢弃
    """
    _check_degree(n)
    if not coeffs:
        raise ShapeMismatch("Toeplitz 系数列表为空")
    blocks = [as_cmat(c, f"coeffs[{k}]") for k, c in enumerate(coeffs)]
    d_out, d_in = blocks[0].shape
    for k, c in enumerate(blocks):
        if c.shape != (d_out, d_in):
            raise ShapeMismatch(f"coeffs[{k}] 形状 {c.shape} 与 {(d_out, d_in)} 不一致")

    matrix = np.zeros((n * d_out, n * d_in), dtype=np.complex128)
    power = np.eye(n, dtype=np.complex128)
    step = lower_shift(n)
    for c in blocks[:n]:
        matrix += np.kron(power, c)
        power = step @ power
    return HardyOp(n, d_in, d_out, OpKind.ANALYTIC_TOEPLITZ, matrix, coeffs=blocks)


def interior_projector(n: int, fiber_dim: int, depth: int = 1) -> HardyOp:
    """到内部子空间 {f : f_{N-depth} = ... = f_{N-1} = 0} 的正交投影"""
    _check_degree(n)
    mask = np.zeros(n)
    mask[: max(n - depth, 0)] = 1.0
    matrix = np.kron(np.diag(mask), np.eye(fiber_dim)).astype(np.complex128)
    return HardyOp(n, fiber_dim, fiber_dim, OpKind.DENSE, matrix)


def column_space_projector(
    columns: np.ndarray,
    fiber_dim: int,
    rank_tol: float = RANK_TOL,
    rank: Optional[int] = None,
) -> HardyOp:
    """
    到列空间的正交投影

    rank 给定时取前 rank 个左奇异向量, 否则按 rank_tol 判定数值秩
    """
    columns = as_cmat(columns, "columns")
    rows = columns.shape[0]
    n = rows // fiber_dim if fiber_dim else 0

    if rank is None:
        basis = range_basis(columns, rank_tol=rank_tol).basis
    elif rank == 0 or columns.size == 0:
        basis = np.zeros((rows, 0), dtype=np.complex128)
    else:
        u, _, _ = scipy.linalg.svd(columns, full_matrices=False)
        basis = u[:, :rank]

    matrix = basis @ adjoint(basis)
    return HardyOp(n, fiber_dim, fiber_dim, OpKind.DENSE, (matrix + adjoint(matrix)) / 2)


def constant_embedding(block: np.ndarray, n: int) -> np.ndarray:
    """把 d x m 矩阵放在 0 次系数位置: 列向量映为常值函数"""
    block = np.asarray(block, dtype=np.complex128)
    d, m = block.shape
    out = np.zeros((n * d, m), dtype=np.complex128)
    out[:d, :] = block
    return out


def top_degree_rows(n: int, fiber_dim: int, depth: int = 1) -> slice:
    """最高 depth 个次数的行下标"""
    return slice(max(n - depth, 0) * fiber_dim, n * fiber_dim)
