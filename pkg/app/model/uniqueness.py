"""
极小 Andô 膨胀的唯一性
把 Schäffer 与 Douglas 两个模型写成统一的三元组 (W1, W2, W; pi), 检查其属于族 U_T,
并在 Krylov 向量上构造两者之间的酉等价
"""

import logging
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np
import scipy.linalg

from ..dilation.douglas import DEFAULT_DEGREE, MAX_DEGREE, TAIL_TOL, build_douglas_data, build_douglas_pair, choose_degree
from ..dilation.schaffer import build_schaffer_pair, compress_to_s
from ..operators.ando import build_ando_tuple
from ..operators.errors import GramMismatch, InvalidConfig
from ..operators.hardy import shift
from ..operators.linalg import adjoint, op_norm, range_basis
from ..operators.pairs import CommutingPair

logger = logging.getLogger("Dilato.Construct")

GRAM_TOL = 1e-8
KRYLOV_RANK_TOL = 1e-9


@dataclass
class DilationTriple:
    """
    截断空间 C^prefix ⊕ H^2_N(C^fiber) ⊕ C^suffix 上的三元组 (w1, w2, w) 与嵌入 pi
    """

    name: str
    w1: np.ndarray
    w2: np.ndarray
    w: np.ndarray
    pi: np.ndarray
    prefix_dim: int
    fiber_dim: int
    degree: int
    suffix_dim: int

    @property
    def total_dim(self) -> int:
        return self.prefix_dim + self.degree * self.fiber_dim + self.suffix_dim

    def top_rows(self) -> np.ndarray:
        """最高次系数块的下标"""
        start = self.prefix_dim + (self.degree - 1) * self.fiber_dim
        return np.arange(start, start + self.fiber_dim)

    def head_rows(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.total_dim), self.top_rows())

    def interior(self) -> np.ndarray:
        """到最高次系数为零的子空间的投影"""
        mask = np.ones(self.total_dim)
        mask[self.top_rows()] = 0.0
        return np.diag(mask)


def _h_columns(total: int, dim: int) -> np.ndarray:
    e = np.zeros((total, dim), dtype=np.complex128)
    e[:dim, :] = np.eye(dim)
    return e


def schaffer_triple(pair: CommutingPair, n: int) -> DilationTriple:
    """压缩后的 Schäffer 三元组 (S1, S2, V_S), pi 为 H 的嵌入"""
    tup = build_ando_tuple(pair)
    dil = build_schaffer_pair(pair, tup, n)
    s1, s2 = compress_to_s(dil, n)
    return DilationTriple(
        name="schaffer",
        w1=s1,
        w2=s2,
        w=dil.vs,
        pi=_h_columns(dil.vs.shape[0], pair.dim),
        prefix_dim=pair.dim,
        fiber_dim=dil.k_t,
        degree=n,
        suffix_dim=0,
    )


def full_schaffer_triple(pair: CommutingPair, n: int) -> DilationTriple:
    """完整空间 H ⊕ H^2_N(F) 上的 (V1, V2, V1 V2); F 大于 D_T 时不是极小的"""
    tup = build_ando_tuple(pair)
    dil = build_schaffer_pair(pair, tup, n)
    return DilationTriple(
        name="schaffer_full",
        w1=dil.v1,
        w2=dil.v2,
        w=dil.v,
        pi=dil.h_columns(),
        prefix_dim=pair.dim,
        fiber_dim=dil.f_dim,
        degree=n,
        suffix_dim=0,
    )


def douglas_triple(
    pair: CommutingPair,
    n: int = DEFAULT_DEGREE,
    depth: int = 0,
    max_degree: int = MAX_DEGREE,
    tail_tol: float = TAIL_TOL,
) -> DilationTriple:
    """
    压缩后的 Douglas 三元组 (Pi_Gamma^H V_iD Pi_Gamma, M_z ⊕ W; Pi_D)

    截断次数取满足尾部条件的 N 再加上 depth, 使深度为 depth 的 Krylov 向量不受截断影响
    """
    data = build_douglas_data(pair)
    base, _ = choose_degree(pair.t, data.asym.q, n, max_degree, tail_tol)
    dil = build_douglas_pair(pair, data, base + depth, adaptive=False)
    k_star = data.defect_star.dim
    pg = dil.pi_gamma
    return DilationTriple(
        name="douglas",
        w1=adjoint(pg) @ dil.v1d @ pg,
        w2=adjoint(pg) @ dil.v2d @ pg,
        w=scipy.linalg.block_diag(shift(dil.n, k_star).matrix, data.x),
        pi=dil.pi_d,
        prefix_dim=0,
        fiber_dim=k_star,
        degree=dil.n,
        suffix_dim=data.r_dim,
    )


def forced_gram(t: np.ndarray, depth: int) -> np.ndarray:
    """由膨胀性质确定的 Krylov Gram 矩阵: 块 (k, m) = T^{m-k} (m >= k), 下三角为其伴随"""
    dim = t.shape[0]
    powers = [np.eye(dim, dtype=np.complex128)]
    for _ in range(1, depth):
        powers.append(powers[-1] @ t)
    gram = np.zeros((depth * dim, depth * dim), dtype=np.complex128)
    for k in range(depth):
        for m in range(depth):
            block = powers[m - k] if m >= k else adjoint(powers[k - m])
            gram[k * dim : (k + 1) * dim, m * dim : (m + 1) * dim] = block
    return gram


def krylov(triple: DilationTriple, depth: int) -> np.ndarray:
    """[pi, W pi, ..., W^{depth-1} pi]"""
    blocks = [triple.pi]
    for _ in range(1, depth):
        blocks.append(triple.w @ blocks[-1])
    return np.hstack(blocks)


def verify_ut_membership(triple: DilationTriple, pair: CommutingPair) -> Dict[str, Union[float, int, bool]]:
    """
    检查三元组属于族 U_T

    膨胀残差只比较非最高次的行; 交换关系与 W1 = W2^H W 在内部子空间上检查;
    极小性以深度 N + 1 的 Krylov 向量的秩与总维数比较
    """
    rows = triple.head_rows()
    j = triple.interior()
    pi = triple.pi

    def dilation(w: np.ndarray, t: np.ndarray) -> float:
        return op_norm((adjoint(w) @ pi - pi @ adjoint(t))[rows, :])

    span = krylov(triple, triple.degree + 1)
    rank = range_basis(span, rank_tol=KRYLOV_RANK_TOL).dim

    return {
        "dilation_1": dilation(triple.w1, pair.t1),
        "dilation_2": dilation(triple.w2, pair.t2),
        "dilation_product": dilation(triple.w, pair.t),
        "pi_isometry": op_norm(adjoint(pi) @ pi - np.eye(pair.dim)),
        "commute_1": op_norm((triple.w1 @ triple.w - triple.w @ triple.w1) @ j),
        "commute_2": op_norm((triple.w2 @ triple.w - triple.w @ triple.w2) @ j),
        "factor_relation": op_norm((triple.w1 - adjoint(triple.w2) @ triple.w) @ j),
        "krylov_rank": rank,
        "total_dim": triple.total_dim,
        "minimal": rank == triple.total_dim,
    }


def align_minimal_dilations(
    pair: CommutingPair,
    schaffer: DilationTriple,
    douglas: DilationTriple,
    n: int,
    gram_tol: float = GRAM_TOL,
) -> Tuple[np.ndarray, float]:
    """
    在深度 n 的 Krylov 向量上构造 omega: W_S^k (h ⊕ 0) -> W_D^k Pi_D h

    两侧用同一个 Gram 矩阵的特征分解标准正交化; 残差在深度 n - 1 的 Krylov 子空间上计算

    Raises:
        GramMismatch: 两侧 Gram 矩阵之差超过 gram_tol
    """
    if n < 2:
        raise InvalidConfig(f"Krylov 深度至少为 2, 实际 {n}")
    if schaffer.degree < n:
        raise InvalidConfig(f"Schäffer 截断次数 {schaffer.degree} 小于 Krylov 深度 {n}")

    ks = krylov(schaffer, n)
    kd = krylov(douglas, n)
    gram_s = adjoint(ks) @ ks
    gram_d = adjoint(kd) @ kd
    mismatch = op_norm(gram_s - gram_d)
    if mismatch > gram_tol:
        raise GramMismatch("两个膨胀的 Krylov Gram 矩阵不一致", residual=mismatch)

    evals, evecs = scipy.linalg.eigh((gram_s + adjoint(gram_s)) / 2)
    keep = evals > KRYLOV_RANK_TOL * max(float(evals[-1]), 1.0)
    scale = evecs[:, keep] / np.sqrt(evals[keep])
    q_s = ks @ scale
    q_d = kd @ scale
    omega = q_d @ adjoint(q_s)

    interior = range_basis(ks[:, : (n - 1) * pair.dim], rank_tol=KRYLOV_RANK_TOL).basis
    residual = max(
        op_norm(omega @ ws @ interior - wd @ omega @ interior)
        for ws, wd in ((schaffer.w1, douglas.w1), (schaffer.w2, douglas.w2), (schaffer.w, douglas.w))
    )
    logger.debug(f"极小膨胀对齐: 深度 {n}, Gram 差 {mismatch:.2e}, 残差 {residual:.2e}")
    return omega, residual
