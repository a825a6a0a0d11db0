"""
Andô 元组
构造 (F, Lambda, P, U), BCL 系数 E1, E2 与基本算子 F1, F2, 并验证其定义方程

F = D_{T1} ⊕ D_{T2}, 以两个亏空间的基坐标表示; 有限维时部分等距的定义域与值域维数
总是相同, 不需要任何补充空间.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, IdentityViolation, ShapeMismatch
from .hardy import PencilSymbol, mult_op
from .linalg import (
    SubspaceBasis,
    adjoint,
    as_cmat,
    numerical_radius,
    op_norm,
    polar_parts,
    random_unitary,
    range_basis,
    unitary_completion,
)
from .pairs import CommutingPair, DefectData, defect, defect_adjoint, validate_pair

logger = logging.getLogger("Dilato.Construct")

BCL_TOL = 1e-10


@dataclass
class AndoTuple:
    """Andô 元组 (F, Lambda, P, U)"""

    f_dim: int
    d1_dim: int
    lam: np.ndarray
    p: np.ndarray
    u: np.ndarray
    defect_t: DefectData
    defect_1: DefectData
    defect_2: DefectData

    @property
    def is_surjective(self) -> bool:
        """Lambda 是否映满 F"""
        return self.f_dim == self.defect_t.dim

    def lambda_action(self, pair: CommutingPair) -> np.ndarray:
        """h -> D_{T1} T2 h ⊕ D_{T2} h"""
        return np.vstack([self.defect_1.d_in_basis @ pair.t2, self.defect_2.d_in_basis])

    def u_action(self, pair: CommutingPair) -> np.ndarray:
        """h -> D_{T1} h ⊕ D_{T2} T1 h"""
        return np.vstack([self.defect_1.d_in_basis, self.defect_2.d_in_basis @ pair.t1])


@dataclass
class BCLPair:
    """BCL 系数 E1 = P^⊥ U, E2 = U^H P"""

    e1: np.ndarray
    e2: np.ndarray

    def residuals(self) -> Dict[str, float]:
        e1, e2 = self.e1, self.e2
        eye = np.eye(e1.shape[0])
        return {
            "e1e2": op_norm(e1 @ e2),
            "e2e1": op_norm(e2 @ e1),
            "left_sum": op_norm(e1 @ adjoint(e1) + adjoint(e2) @ e2 - eye),
            "right_sum": op_norm(adjoint(e1) @ e1 + e2 @ adjoint(e2) - eye),
        }


@dataclass
class FundamentalPair:
    """亏空间 D_T 上的基本算子 (F1, F2)"""

    f1: np.ndarray
    f2: np.ndarray
    radii: Tuple[float, float]
    norms: Tuple[float, float]


@dataclass
class DefectRangeRanks:
    """{D_{V1*} V2* h ⊕ D_{V2*} h} 的秩与 dim D_{V1*} + dim D_{V2*}"""

    rank: int
    target: int

    @property
    def equal(self) -> bool:
        return self.rank == self.target


def build_ando_tuple(pair: CommutingPair, complement: Optional[np.ndarray] = None) -> AndoTuple:
    """
    构造 Andô 元组

    Lambda 由 Lambda (D_T h) = D_{T1} T2 h ⊕ D_{T2} h 逐列确定;
    U 是 D_{T1} T2 h ⊕ D_{T2} h -> D_{T1} h ⊕ D_{T2} T1 h 的部分等距的酉扩张.

    Args:
        pair: 交换压缩对
        complement: 可选, 正交补之间的酉矩阵, 替换默认的规范扩张
    """
    dt = defect(pair.t)
    d1 = defect(pair.t1)
    d2 = defect(pair.t2)
    f_dim = d1.dim + d2.dim

    tup = AndoTuple(
        f_dim=f_dim,
        d1_dim=d1.dim,
        lam=np.zeros((f_dim, dt.dim), dtype=np.complex128),
        p=np.zeros((f_dim, f_dim), dtype=np.complex128),
        u=np.eye(f_dim, dtype=np.complex128),
        defect_t=dt,
        defect_1=d1,
        defect_2=d2,
    )
    tup.p[: d1.dim, : d1.dim] = np.eye(d1.dim)

    if dt.dim:
        # D_T 在其值域上的伪逆, 把 D_T h 的坐标还原为 h
        d_plus = scipy.linalg.pinv(dt.d_in_basis)
        lam, _ = polar_parts(tup.lambda_action(pair) @ d_plus)
        images, _ = polar_parts(tup.u_action(pair) @ d_plus)
        for name, iso in (("Lambda", lam), ("U Lambda", images)):
            deficit = op_norm(adjoint(iso) @ iso - np.eye(dt.dim))
            if deficit > 1e-10:
                raise DimensionMismatch(f"{name} 的秩低于 dim D_T = {dt.dim}", residual=deficit)
        tup.lam = lam
    else:
        images = np.zeros((f_dim, 0), dtype=np.complex128)

    dom = SubspaceBasis(f_dim, tup.lam)
    ran = SubspaceBasis(f_dim, images)
    tup.u = unitary_completion(np.eye(dt.dim), dom, ran, complement=complement)

    logger.debug(f"Andô 元组: dim D_T = {dt.dim}, dim F = {f_dim}, dim D_T1 = {d1.dim}")
    return tup


def tuple_residuals(pair: CommutingPair, tup: AndoTuple) -> Dict[str, float]:
    """Andô 元组的全部定义性残差"""
    k = tup.defect_t.dim
    lam_d = tup.lam @ tup.defect_t.d_in_basis
    return {
        "lambda_isometry": op_norm(adjoint(tup.lam) @ tup.lam - np.eye(k)),
        "lambda_action": op_norm(lam_d - tup.lambda_action(pair)),
        "p_projection": max(op_norm(tup.p @ tup.p - tup.p), op_norm(tup.p - adjoint(tup.p))),
        "u_unitary": max(
            op_norm(adjoint(tup.u) @ tup.u - np.eye(tup.f_dim)),
            op_norm(tup.u @ adjoint(tup.u) - np.eye(tup.f_dim)),
        ),
        "u_action": op_norm(tup.u @ lam_d - tup.u_action(pair)),
    }


def bcl_coefficients(tup: AndoTuple) -> BCLPair:
    """(E1, E2) = (P^⊥ U, U^H P)"""
    p_perp = np.eye(tup.f_dim) - tup.p
    return BCLPair(e1=p_perp @ tup.u, e2=adjoint(tup.u) @ tup.p)


def bcl_from_coefficients(e1, e2, tol: float = BCL_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """
    由 BCL 系数还原 (P, U)

    P^⊥ = E1 E1^H; U^H 在 Ran E1 上取 E1^H 的极分解部分等距, 在 Ran E2^H 上取 E2 的

    Raises:
        IdentityViolation: 输入不满足四个恒等式, 或往返残差超过 tol
    """
    e1 = as_cmat(e1, "e1")
    e2 = as_cmat(e2, "e2")
    if e1.shape != e2.shape or e1.shape[0] != e1.shape[1]:
        raise ShapeMismatch(f"E1, E2 必须是同形状方阵: {e1.shape}, {e2.shape}")

    worst = max(BCLPair(e1, e2).residuals().values())
    if worst > tol:
        raise IdentityViolation("E1, E2 不满足 BCL 恒等式", residual=worst)

    eye = np.eye(e1.shape[0])
    p_perp = e1 @ adjoint(e1)
    p = eye - (p_perp + adjoint(p_perp)) / 2
    u1, _ = polar_parts(adjoint(e1))
    u2, _ = polar_parts(e2)
    u = adjoint(u1 + u2)

    round_trip = max(op_norm((eye - p) @ u - e1), op_norm(adjoint(u) @ p - e2))
    if round_trip > tol:
        raise IdentityViolation("由 E1, E2 还原的 (P, U) 往返失败", residual=round_trip)
    return p, u


def random_bcl_data(dim: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """随机投影 P 与随机酉矩阵 U"""
    rng = np.random.default_rng(seed)
    frame = random_unitary(dim, rng)
    rank = int(rng.integers(0, dim + 1))
    p = frame[:, :rank] @ adjoint(frame[:, :rank])
    return (p + adjoint(p)) / 2, random_unitary(dim, rng)


def bcl_shift_pair(e1: np.ndarray, e2: np.ndarray, n: int) -> CommutingPair:
    """截断的 BCL 乘法算子对 (M_{E1 + z E2^H}, M_{E2 + z E1^H})"""
    v1 = mult_op(PencilSymbol(e1, adjoint(e2)), n).matrix
    v2 = mult_op(PencilSymbol(e2, adjoint(e1)), n).matrix
    return validate_pair(v1, v2)


def fundamental_ops(pair: CommutingPair, tup: AndoTuple, grid: int = 256) -> FundamentalPair:
    """(F1, F2) = (Lambda^H P^⊥ U Lambda, Lambda^H U^H P Lambda)"""
    bcl = bcl_coefficients(tup)
    f1 = adjoint(tup.lam) @ bcl.e1 @ tup.lam
    f2 = adjoint(tup.lam) @ bcl.e2 @ tup.lam
    return _fundamental_pair(f1, f2, grid)


def _fundamental_pair(f1: np.ndarray, f2: np.ndarray, grid: int) -> FundamentalPair:
    return FundamentalPair(
        f1=f1,
        f2=f2,
        radii=(numerical_radius(f1, grid), numerical_radius(f2, grid)),
        norms=(op_norm(f1), op_norm(f2)),
    )


def solve_fund_eqs(pair: CommutingPair, grid: int = 256) -> FundamentalPair:
    """直接求解 D_T F D_T = T1 - T2^H T 与 D_T F D_T = T2 - T1^H T, 不经过 Andô 元组"""
    dt = defect(pair.t)
    if dt.dim == 0:
        empty = np.zeros((0, 0), dtype=np.complex128)
        return _fundamental_pair(empty, empty, grid)

    d_plus = scipy.linalg.pinv(dt.d_in_basis)
    f1 = adjoint(d_plus) @ (pair.t1 - adjoint(pair.t2) @ pair.t) @ d_plus
    f2 = adjoint(d_plus) @ (pair.t2 - adjoint(pair.t1) @ pair.t) @ d_plus
    return _fundamental_pair(f1, f2, grid)


def verify_fund_eqs(
    pair: CommutingPair,
    f1: np.ndarray,
    f2: np.ndarray,
    defect_t: Optional[DefectData] = None,
) -> Tuple[float, float]:
    """||T1 - T2^H T - D_T F1 D_T|| 与 ||T2 - T1^H T - D_T F2 D_T||"""
    dt = defect_t if defect_t is not None else defect(pair.t)
    dc = dt.d_in_basis
    res1 = op_norm(pair.t1 - adjoint(pair.t2) @ pair.t - adjoint(dc) @ f1 @ dc)
    res2 = op_norm(pair.t2 - adjoint(pair.t1) @ pair.t - adjoint(dc) @ f2 @ dc)
    return res1, res2


def defect_range_ranks(v1: np.ndarray, v2: np.ndarray) -> DefectRangeRanks:
    """交换等距对的亏值域等式, 以秩的形式检查"""
    d1s = defect_adjoint(v1)
    d2s = defect_adjoint(v2)
    stacked = np.vstack([d1s.d_in_basis @ adjoint(as_cmat(v2)), d2s.d_in_basis])
    rank = range_basis(stacked, abs_tol=1e-7).dim if stacked.size else 0
    return DefectRangeRanks(rank=rank, target=d1s.dim + d2s.dim)
