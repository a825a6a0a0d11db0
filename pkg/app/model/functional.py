"""
纯情形的函数模型
𝒬 = H^2_N(D_{T*}) ⊖ Theta_T H^2_N(D_T), 模型算子是 M_{G1^H + zG2}, M_{G2^H + zG1}, M_z 在 𝒬 上的压缩

截断 Toeplitz 矩阵 M_Theta 有 N k - dim H 个等于 1 的奇异值, 其余 dim H 个不超过 ||T^N||;
𝒬 取后者对应的左奇异向量.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from ..dilation.douglas import DouglasDilation, observability
from ..operators.errors import NotPure, ShapeMismatch, TailNotConverged
from ..operators.hardy import HardyOp, OpKind, PencilSymbol, analytic_toeplitz, mult_op, shift
from ..operators.linalg import adjoint, as_cmat, op_norm, pencil_sup_norm
from ..operators.pairs import CommutingPair, asymptotic_limit, validate_pair
from .characteristic import CharTriple, char_coefficients

logger = logging.getLogger("Dilato.Construct")

POWER_TOL = 1e-8
MODEL_TOL = 1e-7
# 等于 1 的奇异值与尾部奇异值之间的分界
GAP_SPLIT = 0.5


@dataclass
class FunctionalModel:
    """截断次数为 n 的函数模型"""

    n: int
    fiber_dim: int
    q_projector: HardyOp
    q_basis: np.ndarray
    m_phi: HardyOp
    m_psi: HardyOp
    model_triple: Tuple[np.ndarray, np.ndarray, np.ndarray]
    power_norm: float
    gap: Tuple[float, float]

    @property
    def dim(self) -> int:
        return int(self.q_basis.shape[1])

    @property
    def tolerance(self) -> float:
        return MODEL_TOL + 10 * self.power_norm

    def product_relation(self) -> float:
        """压缩后的 M_z 与压缩后的 M_Phi M_Psi 之差"""
        c1, c2, c = self.model_triple
        return op_norm(c - c1 @ c2)

    def as_pair(self) -> CommutingPair:
        """以 𝒬 的标准正交基表示的模型算子对"""
        c1, c2, _ = self.model_triple
        return validate_pair(c1, c2, tol=self.tolerance)


def _pure_power_degree(t: np.ndarray, start: int, max_degree: int, tol: float) -> Tuple[int, float]:
    n = start
    while True:
        power = op_norm(np.linalg.matrix_power(t, n))
        if power <= tol:
            return n, power
        if n >= max_degree:
            raise TailNotConverged(f"N = {n} 时 ||T^N|| 仍大于 {tol:.0e}", residual=power)
        n = min(2 * n, max_degree)


def functional_model(
    triple: CharTriple,
    n: int = 16,
    max_degree: int = 256,
    power_tol: float = POWER_TOL,
) -> FunctionalModel:
    """
    构造函数模型, N 自 n 起倍增到 ||T^N|| <= power_tol

    Raises:
        NotPure: T 不是纯压缩
        TailNotConverged: N 达到 max_degree 仍未满足条件, 或奇异值缺少间隙
    """
    cf = triple.theta
    t = cf.t
    dim = t.shape[0]
    if not asymptotic_limit(t).pure:
        raise NotPure("T 不是纯压缩, 函数模型不适用")

    k_star, k = cf.shape
    n, power = _pure_power_degree(t, n, max_degree, power_tol)
    while n * k_star < dim and n < max_degree:
        n = min(2 * n, max_degree)

    toeplitz = analytic_toeplitz(char_coefficients(cf, n), n)
    u, s, _ = scipy.linalg.svd(toeplitz.matrix, full_matrices=True)
    size = n * k_star
    # 全部左奇异值(含零空间方向)按降序排列
    sigma = np.concatenate([s, np.zeros(size - s.size)])
    kept, tail = sigma[: size - dim], sigma[size - dim :]
    low = float(kept.min()) if kept.size else 1.0
    high = float(tail.max()) if tail.size else 0.0
    if low < GAP_SPLIT or high > GAP_SPLIT:
        raise TailNotConverged(f"Toeplitz 奇异值没有间隙: 保留部分最小 {low:.3e}, 尾部最大 {high:.3e}")

    q_basis = u[:, size - dim :]
    q_proj = q_basis @ adjoint(q_basis)
    q_projector = HardyOp(n, k_star, k_star, OpKind.DENSE, (q_proj + adjoint(q_proj)) / 2)

    m_phi = mult_op(PencilSymbol(adjoint(triple.g1), triple.g2), n)
    m_psi = mult_op(PencilSymbol(adjoint(triple.g2), triple.g1), n)
    m_z = shift(n, k_star)
    model_triple = tuple(adjoint(q_basis) @ op.matrix @ q_basis for op in (m_phi, m_psi, m_z))

    logger.debug(f"函数模型: N = {n}, dim 𝒬 = {dim}, ||T^N|| = {power:.2e}, 间隙 ({low:.3f}, {high:.2e})")
    return FunctionalModel(
        n=n,
        fiber_dim=k_star,
        q_projector=q_projector,
        q_basis=q_basis,
        m_phi=m_phi,
        m_psi=m_psi,
        model_triple=model_triple,
        power_norm=power,
        gap=(low, high),
    )


def model_equivalence_report(
    pair: CommutingPair,
    fm: FunctionalModel,
    dil: Optional[DouglasDilation] = None,
) -> Dict[str, float]:
    """
    观测算子 O 作为 H 到 𝒬 的酉等价的各项残差

    dil 为同一截断次数的 Douglas 膨胀时直接取其 Pi_D (纯情形 R = 0, Pi_D = O)
    """
    if not asymptotic_limit(pair.t).pure:
        raise NotPure("T 不是纯压缩, 函数模型不适用")

    if dil is not None and dil.n == fm.n and dil.r_dim == 0:
        obs = dil.pi_d
    else:
        obs = observability(pair.t, None, fm.n)

    o_q = adjoint(fm.q_basis) @ obs
    c1, c2, c = fm.model_triple
    report = {
        "intertwine_1": op_norm(o_q @ adjoint(pair.t1) - adjoint(c1) @ o_q),
        "intertwine_2": op_norm(o_q @ adjoint(pair.t2) - adjoint(c2) @ o_q),
        "intertwine_product": op_norm(o_q @ adjoint(pair.t) - adjoint(c) @ o_q),
        "isometry": op_norm(adjoint(obs) @ obs - np.eye(pair.dim)),
        "range": op_norm(obs - fm.q_projector.matrix @ obs),
        "product_relation": fm.product_relation(),
    }
    return report


def verify_model_equivalence(
    pair: CommutingPair,
    fm: FunctionalModel,
    dil: Optional[DouglasDilation] = None,
) -> float:
    """max_i ||O T_i^H - C_i^H O||, 连同 O 的等距性与 Ran O = 𝒬"""
    return max(model_equivalence_report(pair, fm, dil).values())


def admissible_check(
    g1: np.ndarray,
    g2: np.ndarray,
    theta_coeffs: List[np.ndarray],
    n: int,
    grid: int = 256,
    tol: float = MODEL_TOL,
) -> Dict[str, Union[float, bool]]:
    """
    容许三元组检查

    M = Theta H^2_N 取截断 Toeplitz 矩阵奇异值大于 1/2 的左奇异向量, 𝒬 为其正交补
    """
    g1 = as_cmat(g1, "g1")
    g2 = as_cmat(g2, "g2")
    if g1.shape != g2.shape or g1.shape[0] != g1.shape[1]:
        raise ShapeMismatch(f"G1, G2 必须是同形状方阵: {g1.shape}, {g2.shape}")
    d = g1.shape[0]
    toeplitz = analytic_toeplitz(theta_coeffs, n)
    if toeplitz.fiber_out != d:
        raise ShapeMismatch(f"Theta 的值域维数 {toeplitz.fiber_out} 与 G 的维数 {d} 不同")

    phi_sup = pencil_sup_norm(adjoint(g1), g2, grid)
    psi_sup = pencil_sup_norm(adjoint(g2), g1, grid)

    u, s, _ = scipy.linalg.svd(toeplitz.matrix, full_matrices=True)
    rank = int(np.count_nonzero(s > GAP_SPLIT))
    p_m = u[:, :rank] @ adjoint(u[:, :rank])
    eye = np.eye(n * d)
    p_q = eye - p_m

    m_phi = mult_op(PencilSymbol(adjoint(g1), g2), n).matrix
    m_psi = mult_op(PencilSymbol(adjoint(g2), g1), n).matrix
    s_adj = adjoint(shift(n, d).matrix)

    report = {
        "phi_sup": phi_sup,
        "psi_sup": psi_sup,
        "invariance_phi": op_norm((eye - p_m) @ m_phi @ p_m),
        "invariance_psi": op_norm((eye - p_m) @ m_psi @ p_m),
        "backward_phi_psi": op_norm((adjoint(m_phi) @ adjoint(m_psi) - s_adj) @ p_q),
        "backward_psi_phi": op_norm((adjoint(m_psi) @ adjoint(m_phi) - s_adj) @ p_q),
        "q_dim": float(n * d - rank),
    }
    report["contractive"] = bool(phi_sup <= 1 + 1e-8 and psi_sup <= 1 + 1e-8)
    residuals = [report[key] for key in ("invariance_phi", "invariance_psi", "backward_phi_psi", "backward_psi_phi")]
    report["admissible"] = bool(report["contractive"] and max(residuals) <= tol)
    return report


def transport_model(fm_a: FunctionalModel, fm_b: FunctionalModel, u_star: np.ndarray) -> float:
    """
    I ⊗ u_* 作为两个函数模型之间的交换算子的残差

    包括 𝒬 投影的搬运, 压缩三元组的交换, 以及在 𝒬 坐标下的酉性
    """
    if fm_a.n != fm_b.n:
        raise ShapeMismatch(f"两个函数模型的截断次数不同: {fm_a.n} 与 {fm_b.n}")
    u_star = as_cmat(u_star, "u_star")
    lift = np.kron(np.eye(fm_a.n), u_star)
    if lift.shape != (fm_b.q_basis.shape[0], fm_a.q_basis.shape[0]):
        raise ShapeMismatch(f"u_star 的形状 {u_star.shape} 与两个模型的纤维维数不相容")

    projector = op_norm(lift @ fm_a.q_projector.matrix @ adjoint(lift) - fm_b.q_projector.matrix)
    w = adjoint(fm_b.q_basis) @ lift @ fm_a.q_basis
    residual = max(projector, op_norm(adjoint(w) @ w - np.eye(fm_a.dim)))
    for op_a, op_b in zip(fm_a.model_triple, fm_b.model_triple):
        residual = max(residual, op_norm(w @ op_a - op_b @ w))
    return residual
