"""
Schäffer 模型的 Andô 膨胀

空间 H ⊕ H^2_N(F) 上的等距对
    V1 = [[T1, 0], [E2^H Lambda D_T, M_{E1 + z E2^H}]]
    V2 = [[T2, 0], [E1^H Lambda D_T, M_{E2 + z E1^H}]]
经典 Schäffer 膨胀 V_S, 嵌入 Pi_Lambda = I ⊕ (I ⊗ Lambda), 以及压缩对 (S1, S2).

等距与交换性只在内部子空间(最高次系数为零)上断言; 伴随关系在整个截断空间上精确.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.linalg

from ..operators.ando import AndoTuple, FundamentalPair, bcl_coefficients, verify_fund_eqs
from ..operators.errors import InvalidConfig
from ..operators.hardy import (
    PencilSymbol,
    constant_embedding,
    interior_projector,
    mult_op,
    shift,
)
from ..operators.linalg import adjoint, op_norm, pencil_sup_norm
from ..operators.pairs import CommutingPair, DefectData, defect

logger = logging.getLogger("Dilato.Construct")


@dataclass
class SchafferDilation:
    """Schäffer 模型膨胀"""

    n: int
    dim: int
    f_dim: int
    k_t: int
    v1: np.ndarray
    v2: np.ndarray
    v: np.ndarray
    pi_lambda: np.ndarray
    vs: np.ndarray
    lam_d: np.ndarray

    @property
    def space_dim(self) -> int:
        return self.dim + self.n * self.f_dim

    def h_columns(self) -> np.ndarray:
        """H 在 H ⊕ H^2_N(F) 中的嵌入"""
        e = np.zeros((self.space_dim, self.dim), dtype=np.complex128)
        e[: self.dim, :] = np.eye(self.dim)
        return e

    def interior(self) -> np.ndarray:
        return scipy.linalg.block_diag(np.eye(self.dim), interior_projector(self.n, self.f_dim).matrix)


def _lower_block(top: np.ndarray, coupling: np.ndarray, hardy: np.ndarray) -> np.ndarray:
    """[[top, 0], [coupling, hardy]]"""
    dim = top.shape[0]
    size = dim + hardy.shape[0]
    out = np.zeros((size, size), dtype=np.complex128)
    out[:dim, :dim] = top
    out[dim:, :dim] = coupling
    out[dim:, dim:] = hardy
    return out


def build_vs(t: np.ndarray, n: int, defect_t: Optional[DefectData] = None) -> np.ndarray:
    """经典 Schäffer 膨胀 V_S = [[T, 0], [D_T, M_z]], 作用在 H ⊕ H^2_N(D_T) 上"""
    dt = defect_t if defect_t is not None else defect(t)
    return _lower_block(t, constant_embedding(dt.d_in_basis, n), shift(n, dt.dim).matrix)


def build_schaffer_pair(pair: CommutingPair, tup: AndoTuple, n: int) -> SchafferDilation:
    """由 Andô 元组构造 Schäffer 模型的等距膨胀对"""
    bcl = bcl_coefficients(tup)
    dt = tup.defect_t
    lam_d = tup.lam @ dt.d_in_basis

    v1 = _lower_block(
        pair.t1,
        constant_embedding(adjoint(bcl.e2) @ lam_d, n),
        mult_op(PencilSymbol(bcl.e1, adjoint(bcl.e2)), n).matrix,
    )
    v2 = _lower_block(
        pair.t2,
        constant_embedding(adjoint(bcl.e1) @ lam_d, n),
        mult_op(PencilSymbol(bcl.e2, adjoint(bcl.e1)), n).matrix,
    )
    pi_lambda = scipy.linalg.block_diag(np.eye(pair.dim), np.kron(np.eye(n), tup.lam)).astype(np.complex128)

    logger.debug(f"Schäffer 膨胀: N = {n}, 空间维数 {v1.shape[0]}")
    return SchafferDilation(
        n=n,
        dim=pair.dim,
        f_dim=tup.f_dim,
        k_t=dt.dim,
        v1=v1,
        v2=v2,
        v=v1 @ v2,
        pi_lambda=pi_lambda,
        vs=build_vs(pair.t, n, dt),
        lam_d=lam_d,
    )


def compress_to_s(dil: SchafferDilation, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """S_i = Pi_Lambda^H V_i Pi_Lambda"""
    if n != dil.n:
        raise InvalidConfig(f"截断次数 {n} 与膨胀的 {dil.n} 不一致")
    pi = dil.pi_lambda
    return adjoint(pi) @ dil.v1 @ pi, adjoint(pi) @ dil.v2 @ pi


def assemble_s(pair: CommutingPair, dt: DefectData, fund: FundamentalPair, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """直接拼装 [[T1, 0], [F2^H D_T, M_{F1 + z F2^H}]] 与对称的 S2"""
    dc = dt.d_in_basis
    s1 = _lower_block(
        pair.t1,
        constant_embedding(adjoint(fund.f2) @ dc, n),
        mult_op(PencilSymbol(fund.f1, adjoint(fund.f2)), n).matrix,
    )
    s2 = _lower_block(
        pair.t2,
        constant_embedding(adjoint(fund.f1) @ dc, n),
        mult_op(PencilSymbol(fund.f2, adjoint(fund.f1)), n).matrix,
    )
    return s1, s2


def schaffer_residuals(
    pair: CommutingPair,
    tup: AndoTuple,
    dil: SchafferDilation,
    fund: FundamentalPair,
    grid: int = 256,
) -> Dict[str, float]:
    """Schäffer 模型的全部残差, 以名称为键"""
    j = dil.interior()
    eye = np.eye(dil.space_dim)
    e_h = dil.h_columns()
    coupling = constant_embedding(dil.lam_d, dil.n)

    v12 = dil.v1 @ dil.v2
    v21 = dil.v2 @ dil.v1

    s1, s2 = compress_to_s(dil, dil.n)
    d1, d2 = assemble_s(pair, tup.defect_t, fund, dil.n)
    s_h = np.zeros((s1.shape[0], pair.dim), dtype=np.complex128)
    s_h[: pair.dim, :] = np.eye(pair.dim)
    vs_adj_h = adjoint(dil.vs) @ s_h

    fund_1, fund_2 = verify_fund_eqs(pair, fund.f1, fund.f2, tup.defect_t)
    top = eye - j

    return {
        "isometry_v1": op_norm(j @ (adjoint(dil.v1) @ dil.v1 - eye) @ j),
        "isometry_v2": op_norm(j @ (adjoint(dil.v2) @ dil.v2 - eye) @ j),
        "commutation": op_norm((v12 - v21) @ j),
        "dilation_v1": op_norm(adjoint(dil.v1) @ e_h - e_h @ adjoint(pair.t1)),
        "dilation_v2": op_norm(adjoint(dil.v2) @ e_h - e_h @ adjoint(pair.t2)),
        "product_block": max(
            op_norm(v12[pair.dim :, : pair.dim] - coupling),
            op_norm(v21[pair.dim :, : pair.dim] - coupling),
        ),
        "compression_vs": op_norm(adjoint(dil.pi_lambda) @ dil.v @ dil.pi_lambda - dil.vs),
        "fund_eq_1": fund_1,
        "fund_eq_2": fund_2,
        "s_assembly": max(op_norm(s1 - d1), op_norm(s2 - d2)),
        "part_s_relations": max(
            op_norm(adjoint(s1) @ adjoint(s2) @ s_h - vs_adj_h),
            op_norm(adjoint(s2) @ adjoint(s1) @ s_h - vs_adj_h),
        ),
        "s_contraction": max(0.0, op_norm(s1) - 1.0, op_norm(s2) - 1.0),
        "phi_sup": pencil_sup_norm(fund.f1, adjoint(fund.f2), grid),
        "psi_sup": pencil_sup_norm(fund.f2, adjoint(fund.f1), grid),
        "top_degree_deficit": op_norm(top @ (adjoint(dil.v1) @ dil.v1 - eye) @ top),
    }
