"""
Douglas 模型的 Andô 膨胀

H^2_N(F_*) ⊕ R 上的等距对
    V1D = M_{H1^H + z H2} ⊕ W1,  V2D = M_{H2^H + z H1} ⊕ W2
其中 R = Ran Q, W_i = X_i (有限维时 Ran Q 上的等距即酉), (H1, H2) 来自伴随对 (T1^H, T2^H)
的 Andô 元组 (Gamma, P', U').

嵌入 Pi_D h = O(h) ⊕ Qh, Pi_Gamma = (I ⊗ Gamma) ⊕ I_R, Pi~ = Pi_Gamma Pi_D.
伴随侧的残差在 N + 1 次上构造, 只比较前 N 个系数块.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.linalg

from ..operators.ando import AndoTuple, FundamentalPair, bcl_coefficients, build_ando_tuple, fundamental_ops
from ..operators.errors import NonUnitaryX, TailNotConverged
from ..operators.hardy import PencilSymbol, interior_projector, mult_op, shift
from ..operators.linalg import SubspaceBasis, adjoint, as_cmat, op_norm, polar_parts, range_basis
from ..operators.pairs import (
    AsymptoticData,
    CommutingPair,
    DefectData,
    asymptotic_limit,
    defect_adjoint,
    tail_norm,
)

logger = logging.getLogger("Dilato.Construct")

DEFAULT_DEGREE = 16
MAX_DEGREE = 256
TAIL_TOL = 1e-10
# X 的酉性残差: 低于前者直接接受, 介于两者之间做极分解再正交化, 超过后者报错
X_ACCEPT_TOL = 1e-10
X_REPAIR_TOL = 1e-8


@dataclass
class DouglasData:
    """Douglas 构造所需的数据, X 系列矩阵均以 q_basis 坐标表示"""

    asym: AsymptoticData
    x1: np.ndarray
    x2: np.ndarray
    x: np.ndarray
    adjoint_tuple: AndoTuple
    h1: np.ndarray
    h2: np.ndarray
    adjoint_fund: FundamentalPair
    x_relation: float = 0.0
    repaired: bool = False

    @property
    def g1(self) -> np.ndarray:
        return self.adjoint_fund.f1

    @property
    def g2(self) -> np.ndarray:
        return self.adjoint_fund.f2

    @property
    def gamma(self) -> np.ndarray:
        return self.adjoint_tuple.lam

    @property
    def defect_star(self) -> DefectData:
        return self.adjoint_tuple.defect_t

    @property
    def r_dim(self) -> int:
        return self.asym.q_basis.dim

    @property
    def f_star(self) -> int:
        return self.adjoint_tuple.f_dim


@dataclass
class DouglasDilation:
    """截断次数为 n 的 Douglas 模型膨胀"""

    n: int
    dim: int
    f_star: int
    r_dim: int
    tail: float
    v1d: np.ndarray
    v2d: np.ndarray
    pi_d: np.ndarray
    pi_gamma: np.ndarray
    pi_tilde: np.ndarray

    @property
    def space_dim(self) -> int:
        return self.n * self.f_star + self.r_dim

    def interior(self) -> np.ndarray:
        return scipy.linalg.block_diag(interior_projector(self.n, self.f_star).matrix, np.eye(self.r_dim))

    def range_of_pi_tilde(self) -> SubspaceBasis:
        """Pi~ 的值域 M, Pi~ 单射时维数等于 dim H"""
        return range_basis(self.pi_tilde)


def _q_rows(asym: AsymptoticData) -> np.ndarray:
    """h -> Qh 在 q_basis 下的坐标"""
    return adjoint(asym.q_basis.basis) @ asym.q


def _solve_x(q_rows: np.ndarray, t: np.ndarray) -> Tuple[np.ndarray, float]:
    """由 X^H Q = Q T^H 在 Ran Q 上解出 X, 返回 X 的坐标与关系残差"""
    r = q_rows.shape[0]
    if r == 0:
        return np.zeros((0, 0), dtype=np.complex128), 0.0
    rhs = q_rows @ adjoint(t)
    x_adj = rhs @ scipy.linalg.pinv(q_rows)
    return adjoint(x_adj), op_norm(x_adj @ q_rows - rhs)


def _unitarity(x: np.ndarray) -> float:
    if x.size == 0:
        return 0.0
    eye = np.eye(x.shape[0])
    return max(op_norm(adjoint(x) @ x - eye), op_norm(x @ adjoint(x) - eye))


def _ensure_unitary(x: np.ndarray, name: str) -> Tuple[np.ndarray, bool]:
    residual = _unitarity(x)
    if residual <= X_ACCEPT_TOL:
        return x, False
    if residual <= X_REPAIR_TOL:
        logger.warning(f"{name} 的酉性残差 {residual:.2e}, 以极分解重新正交化")
        w, _ = polar_parts(x)
        return w, True
    raise NonUnitaryX(f"{name} 在 Ran Q 上不是酉的, 请收紧渐近极限的容差", residual=residual)


def build_douglas_data(pair: CommutingPair, asym_tol: float = 1e-13, max_iter: int = 64) -> DouglasData:
    """
    计算 Q, X1, X2, X 与伴随 Andô 元组

    Raises:
        NoConvergence: 渐近极限未收敛
        NonUnitaryX: X_i 的酉性残差超过 1e-8
    """
    asym = asymptotic_limit(pair.t, tol=asym_tol, max_iter=max_iter)
    q_rows = _q_rows(asym)

    x1, res1 = _solve_x(q_rows, pair.t1)
    x2, res2 = _solve_x(q_rows, pair.t2)
    x, res = _solve_x(q_rows, pair.t)
    x1, fix1 = _ensure_unitary(x1, "X1")
    x2, fix2 = _ensure_unitary(x2, "X2")
    x, fix = _ensure_unitary(x, "X")

    adj_pair = pair.adjoint()
    adj_tup = build_ando_tuple(adj_pair)
    bcl = bcl_coefficients(adj_tup)

    logger.debug(f"Douglas 数据: dim R = {asym.q_basis.dim}, dim F* = {adj_tup.f_dim}")
    return DouglasData(
        asym=asym,
        x1=x1,
        x2=x2,
        x=x,
        adjoint_tuple=adj_tup,
        h1=bcl.e1,
        h2=bcl.e2,
        adjoint_fund=fundamental_ops(adj_pair, adj_tup),
        x_relation=max(res1, res2, res),
        repaired=fix1 or fix2 or fix,
    )


def observability(t: np.ndarray, gamma: Optional[np.ndarray], n: int) -> np.ndarray:
    """
    观测算子 h -> sum_k z^k Gamma D_{T*} T^{*k} h 的前 n 个系数块

    gamma 为 None 时不做后复合, 坐标取 D_{T*} 的基
    """
    t = as_cmat(t, "t")
    dstar = defect_adjoint(t).d_in_basis
    block = dstar if gamma is None else as_cmat(gamma, "gamma") @ dstar
    rows = []
    power = np.eye(t.shape[0], dtype=np.complex128)
    t_adj = adjoint(t)
    for _ in range(n):
        rows.append(block @ power)
        power = power @ t_adj
    return np.vstack(rows)


def choose_degree(
    t: np.ndarray,
    q: np.ndarray,
    start: int = DEFAULT_DEGREE,
    max_degree: int = MAX_DEGREE,
    tol: float = TAIL_TOL,
) -> Tuple[int, float]:
    """
    从 start 起倍增 N, 直到 ||T^N T^{*N} - Q^2|| <= tol

    Raises:
        TailNotConverged: N 达到 max_degree 时尾部仍超过 tol
    """
    n = start
    while True:
        tail = tail_norm(t, q, n)
        if tail <= tol:
            return n, tail
        if n >= max_degree:
            raise TailNotConverged(f"N = {n} 时尾部仍未收敛", residual=tail)
        logger.debug(f"尾部 {tail:.2e} 超过 {tol:.0e}, N 由 {n} 加倍")
        n = min(2 * n, max_degree)


def _embeddings(pair: CommutingPair, data: DouglasData, n: int) -> Tuple[np.ndarray, np.ndarray]:
    pi_d = np.vstack([observability(pair.t, None, n), _q_rows(data.asym)])
    pi_gamma = scipy.linalg.block_diag(np.kron(np.eye(n), data.gamma), np.eye(data.r_dim)).astype(np.complex128)
    return pi_d, pi_gamma


def _douglas_ops(data: DouglasData, n: int) -> Tuple[np.ndarray, np.ndarray]:
    phi = mult_op(PencilSymbol(adjoint(data.h1), data.h2), n).matrix
    psi = mult_op(PencilSymbol(adjoint(data.h2), data.h1), n).matrix
    return scipy.linalg.block_diag(phi, data.x1), scipy.linalg.block_diag(psi, data.x2)


def build_douglas_pair(
    pair: CommutingPair,
    data: DouglasData,
    n: int = DEFAULT_DEGREE,
    adaptive: bool = True,
    max_degree: int = MAX_DEGREE,
    tail_tol: float = TAIL_TOL,
) -> DouglasDilation:
    """
    构造 Douglas 膨胀

    adaptive 为真时 N 从 n 起倍增到满足尾部条件; 否则按给定 N 构造并记录尾部

    Raises:
        TailNotConverged: 自适应倍增到 max_degree 仍未满足尾部条件
    """
    if adaptive:
        n, tail = choose_degree(pair.t, data.asym.q, n, max_degree, tail_tol)
    else:
        tail = tail_norm(pair.t, data.asym.q, n)

    v1d, v2d = _douglas_ops(data, n)
    pi_d, pi_gamma = _embeddings(pair, data, n)
    logger.debug(f"Douglas 膨胀: N = {n}, 尾部 {tail:.2e}")
    return DouglasDilation(
        n=n,
        dim=pair.dim,
        f_star=data.f_star,
        r_dim=data.r_dim,
        tail=tail,
        v1d=v1d,
        v2d=v2d,
        pi_d=pi_d,
        pi_gamma=pi_gamma,
        pi_tilde=pi_gamma @ pi_d,
    )


def verify_lemma_tet_fund(
    pair: CommutingPair,
    data: DouglasData,
    h1: Optional[np.ndarray] = None,
    h2: Optional[np.ndarray] = None,
) -> Tuple[float, float]:
    """
    行递推恒等式
        Gamma D_{T*} T1^H = H1 Gamma D_{T*} + H2^H Gamma D_{T*} T^H
        Gamma D_{T*} T2^H = H2 Gamma D_{T*} + H1^H Gamma D_{T*} T^H

    h1, h2 可替换为扰动后的系数
    """
    h1 = data.h1 if h1 is None else h1
    h2 = data.h2 if h2 is None else h2
    gd = data.gamma @ data.defect_star.d_in_basis
    t_adj = adjoint(pair.t)
    res1 = op_norm(gd @ adjoint(pair.t1) - h1 @ gd - adjoint(h2) @ gd @ t_adj)
    res2 = op_norm(gd @ adjoint(pair.t2) - h2 @ gd - adjoint(h1) @ gd @ t_adj)
    return res1, res2


def boundary_unitarity(data: DouglasData, samples: int = 64) -> float:
    """单位圆上 phi = H1^H + zH2 与 psi = H2^H + zH1 偏离酉的最大值"""
    if data.f_star == 0:
        return 0.0
    eye = np.eye(data.f_star)
    worst = 0.0
    for theta in np.arange(samples) * (2 * np.pi / samples):
        z = np.exp(1j * theta)
        for sym in (adjoint(data.h1) + z * data.h2, adjoint(data.h2) + z * data.h1):
            worst = max(worst, op_norm(adjoint(sym) @ sym - eye), op_norm(sym @ adjoint(sym) - eye))
    return worst


def _intertwining(pair: CommutingPair, data: DouglasData, n: int, which: int) -> float:
    """V_i^H Pi~ = Pi~ T_i^H, 在 N + 1 次上计算并丢弃最高次块"""
    v1d, v2d = _douglas_ops(data, n + 1)
    pi_d, pi_gamma = _embeddings(pair, data, n + 1)
    pi_tilde = pi_gamma @ pi_d
    v, t = (v1d, pair.t1) if which == 1 else (v2d, pair.t2)
    diff = adjoint(v) @ pi_tilde - pi_tilde @ adjoint(t)
    keep = np.r_[0 : n * data.f_star, (n + 1) * data.f_star : diff.shape[0]]
    return op_norm(diff[keep, :])


def douglas_residuals(pair: CommutingPair, data: DouglasData, dil: DouglasDilation) -> Dict[str, float]:
    """Douglas 模型的全部残差, 以名称为键"""
    n = dil.n
    eye_h = np.eye(pair.dim)
    power = np.linalg.matrix_power(pair.t, n)
    q = data.asym.q
    deficit = eye_h - adjoint(dil.pi_d) @ dil.pi_d
    expected = power @ adjoint(power) - q @ q

    compressed = adjoint(dil.pi_gamma) @ dil.v1d @ dil.v2d @ dil.pi_gamma
    target = scipy.linalg.block_diag(shift(n, data.defect_star.dim).matrix, data.x)

    j = dil.interior()
    eye = np.eye(dil.space_dim)
    row_1, row_2 = verify_lemma_tet_fund(pair, data)

    return {
        "x_unitarity": max(_unitarity(data.x1), _unitarity(data.x2), _unitarity(data.x)),
        "x_factorization": op_norm(adjoint(data.x1) @ adjoint(data.x2) - adjoint(data.x)),
        "x_relation": data.x_relation,
        "row_recursion_1": row_1,
        "row_recursion_2": row_2,
        "intertwine_v1": _intertwining(pair, data, n, 1),
        "intertwine_v2": _intertwining(pair, data, n, 2),
        "product_compression": op_norm(compressed - target),
        "pi_d_isometry_deficit_max": op_norm(deficit - expected),
        "boundary_unitarity": boundary_unitarity(data),
        "isometry_v1": op_norm(j @ (adjoint(dil.v1d) @ dil.v1d - eye) @ j),
        "isometry_v2": op_norm(j @ (adjoint(dil.v2d) @ dil.v2d - eye) @ j),
        "commutation": op_norm((dil.v1d @ dil.v2d - dil.v2d @ dil.v1d) @ j),
        "pi_tilde_rank_gap": float(pair.dim - dil.range_of_pi_tilde().dim),
    }
