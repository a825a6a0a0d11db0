"""
特征函数与特征三元组
Theta_T(z) = [-T + z D_{T*} (I - z T^H)^{-1} D_T] 限制在 D_T 上, 以两个亏空间的基坐标表示
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from ..dilation.douglas import DouglasData, build_douglas_data
from ..operators.errors import NonUnitaryInput, OutsideDisk, ShapeMismatch, SingularResolvent
from ..operators.linalg import adjoint, as_cmat, crandn, op_norm, polar_parts
from ..operators.pairs import CommutingPair, DefectData, defect, defect_adjoint

logger = logging.getLogger("Dilato.Construct")

RESOLVENT_TOL = 1e-10
UNITARY_TOL = 1e-10
# 内部采样: 两个圆周, 每个圆周上的角度数由调用方给定
SAMPLE_RADII = (0.5, 0.9)
BOUNDARY_SAMPLES = 64
COINCIDENCE_TOL = 1e-8


@dataclass
class CharFn:
    """Theta_T 的求值数据"""

    t: np.ndarray
    defect: DefectData
    defect_adj: DefectData

    @property
    def shape(self) -> Tuple[int, int]:
        return self.defect_adj.dim, self.defect.dim


@dataclass
class CharTriple:
    """特征三元组 (G1, G2, Theta_T)"""

    g1: np.ndarray
    g2: np.ndarray
    theta: CharFn


@dataclass
class CoincidenceSearch:
    """重合见证的搜索结果; found 为假只表示没有找到"""

    found: bool
    u: Optional[np.ndarray] = None
    u_star: Optional[np.ndarray] = None
    residual: float = float("inf")
    solution_dim: int = 0
    reason: str = ""


def char_fn(t: np.ndarray) -> CharFn:
    t = as_cmat(t, "t")
    return CharFn(t=t, defect=defect(t), defect_adj=defect_adjoint(t))


def char_eval(cf: CharFn, z: complex) -> np.ndarray:
    """
    在圆盘内一点求 Theta_T(z)

    Raises:
        OutsideDisk: |z| > 1
        SingularResolvent: sigma_min(I - z T^H) <= 1e-10
    """
    if abs(z) > 1.0 + 1e-12:
        raise OutsideDisk(f"|z| = {abs(z):.6f} 超过 1")
    k_star, k = cf.shape
    if k == 0 or k_star == 0:
        return np.zeros((k_star, k), dtype=np.complex128)

    n = cf.t.shape[0]
    resolvent = np.eye(n) - z * adjoint(cf.t)
    sigma_min = float(scipy.linalg.svdvals(resolvent)[-1])
    if sigma_min <= RESOLVENT_TOL:
        raise SingularResolvent(f"I - zT^H 在 z = {z:.6f} 处奇异", residual=sigma_min)

    b = cf.defect.basis.basis
    b_star = cf.defect_adj.basis.basis
    full = -cf.t + z * cf.defect_adj.d @ scipy.linalg.solve(resolvent, cf.defect.d)
    return adjoint(b_star) @ full @ b


def char_coefficients(cf: CharFn, n: int) -> List[np.ndarray]:
    """Taylor 系数 Theta_0 = -T|, Theta_k = D_{T*} T^{*(k-1)} D_T (k >= 1)"""
    b = cf.defect.basis.basis
    b_star = cf.defect_adj.basis.basis
    left = cf.defect_adj.d_in_basis
    right = adjoint(cf.defect.d_in_basis)

    coeffs = [-adjoint(b_star) @ cf.t @ b]
    power = np.eye(cf.t.shape[0], dtype=np.complex128)
    t_adj = adjoint(cf.t)
    for _ in range(1, n):
        coeffs.append(left @ power @ right)
        power = power @ t_adj
    return coeffs


def defect_intertwining(cf: CharFn) -> float:
    """||T D_T - D_{T*} T||"""
    return op_norm(cf.t @ cf.defect.d - cf.defect_adj.d @ cf.t)


def char_triple(pair: CommutingPair, data: Optional[DouglasData] = None) -> CharTriple:
    """由 Douglas 数据中的 (G1, G2) 与 Theta_T 组装特征三元组"""
    data = data if data is not None else build_douglas_data(pair)
    return CharTriple(g1=data.g1, g2=data.g2, theta=char_fn(pair.t))


def interior_samples(angles: int = 16) -> np.ndarray:
    thetas = np.arange(angles) * (2 * np.pi / angles)
    return np.concatenate([r * np.exp(1j * thetas) for r in SAMPLE_RADII])


def boundary_samples(samples: int = BOUNDARY_SAMPLES) -> np.ndarray:
    return np.exp(1j * np.arange(samples) * (2 * np.pi / samples))


def boundary_profile(cf: CharFn, samples: int = BOUNDARY_SAMPLES) -> Tuple[np.ndarray, np.ndarray]:
    """单位圆上 Theta_T 的奇异值, 每行按降序排列; 仅对纯压缩有定义"""
    thetas = np.arange(samples) * (2 * np.pi / samples)
    width = min(cf.shape)
    if width == 0:
        return thetas, np.zeros((samples, 0))
    rows = [scipy.linalg.svdvals(char_eval(cf, np.exp(1j * th))) for th in thetas]
    return thetas, np.array(rows)


def boundary_innerness(cf: CharFn, samples: int = BOUNDARY_SAMPLES) -> Tuple[float, float]:
    """边界上 (min sigma_min(Theta), max ||Theta^H Theta - I||)"""
    k = cf.defect.dim
    if k == 0:
        return 1.0, 0.0
    sigma_min = np.inf
    worst = 0.0
    for z in boundary_samples(samples):
        theta = char_eval(cf, z)
        sigma_min = min(sigma_min, float(scipy.linalg.svdvals(theta)[-1]))
        worst = max(worst, op_norm(adjoint(theta) @ theta - np.eye(k)))
    return float(sigma_min), worst


def _check_unitary(u: np.ndarray, name: str) -> np.ndarray:
    u = as_cmat(u, name)
    if u.shape[0] != u.shape[1]:
        raise NonUnitaryInput(f"{name} 不是方阵: {u.shape}")
    if u.size == 0:
        return u
    residual = op_norm(adjoint(u) @ u - np.eye(u.shape[0]))
    if residual > UNITARY_TOL:
        raise NonUnitaryInput(f"{name} 不是酉的", residual=residual)
    return u


def check_coincidence(
    a: CharTriple,
    b: CharTriple,
    u: np.ndarray,
    u_star: np.ndarray,
    z_samples: int = 16,
) -> float:
    """
    重合残差 max_z ||Theta_b(z) u - u_* Theta_a(z)|| 与 max_i ||u_* G_i(a) - G_i(b) u_*||

    Raises:
        NonUnitaryInput: u 或 u_* 不是酉矩阵
        ShapeMismatch: 维数与两个三元组的亏空间不相容
    """
    u = _check_unitary(u, "u")
    u_star = _check_unitary(u_star, "u_star")
    if u.shape != (b.theta.shape[1], a.theta.shape[1]):
        raise ShapeMismatch(f"u 的形状 {u.shape} 与 D_T 维数不相容")
    if u_star.shape != (b.theta.shape[0], a.theta.shape[0]):
        raise ShapeMismatch(f"u_star 的形状 {u_star.shape} 与 D_T* 维数不相容")

    residual = max(
        op_norm(u_star @ a.g1 - b.g1 @ u_star),
        op_norm(u_star @ a.g2 - b.g2 @ u_star),
    )
    for z in interior_samples(z_samples):
        residual = max(residual, op_norm(char_eval(b.theta, z) @ u - u_star @ char_eval(a.theta, z)))
    return residual


def induced_unitaries(a: CharTriple, b: CharTriple, omega: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """b 的算子对由 a 的算子对经 omega 共轭得到时, omega 在两组亏空间上诱导的酉矩阵"""
    omega = as_cmat(omega, "omega")
    u = adjoint(b.theta.defect.basis.basis) @ omega @ a.theta.defect.basis.basis
    u_star = adjoint(b.theta.defect_adj.basis.basis) @ omega @ a.theta.defect_adj.basis.basis
    return u, u_star


def _vec_system(a: CharTriple, b: CharTriple, taylor_terms: int) -> np.ndarray:
    """未知量 (vec u, vec u_*) 的齐次线性方程组, 列主序向量化"""
    k_star, k = a.theta.shape
    eye_k = np.eye(k)
    eye_ks = np.eye(k_star)
    rows = []
    for th_a, th_b in zip(char_coefficients(a.theta, taylor_terms), char_coefficients(b.theta, taylor_terms)):
        rows.append(np.hstack([np.kron(eye_k, th_b), -np.kron(th_a.T, eye_ks)]))
    zeros = np.zeros((k_star * k_star, k * k))
    for g_a, g_b in ((a.g1, b.g1), (a.g2, b.g2)):
        rows.append(np.hstack([zeros, np.kron(g_a.T, eye_ks) - np.kron(eye_ks, g_b)]))
    return np.vstack(rows)


def search_coincidence(
    a: CharTriple,
    b: CharTriple,
    taylor_terms: int = 8,
    seed: int = 0,
    tol: float = COINCIDENCE_TOL,
) -> CoincidenceSearch:
    """
    搜索重合见证 (u, u_*)

    解 Taylor 系数与 G 的联合线性交换方程, 取解空间中的一个随机元素, 用极分解投影到酉矩阵,
    再用 check_coincidence 验证
    """
    if a.theta.shape != b.theta.shape:
        return CoincidenceSearch(found=False, reason=f"亏空间维数不同: {a.theta.shape} 与 {b.theta.shape}")
    k_star, k = a.theta.shape
    if k == 0 and k_star == 0:
        empty = np.zeros((0, 0), dtype=np.complex128)
        return CoincidenceSearch(found=True, u=empty, u_star=empty, residual=0.0)

    basis = scipy.linalg.null_space(_vec_system(a, b, taylor_terms), rcond=1e-10)
    if basis.shape[1] == 0:
        return CoincidenceSearch(found=False, reason="线性交换方程只有零解")

    rng = np.random.default_rng(seed)
    generic = basis @ crandn(basis.shape[1], rng)
    u_raw = generic[: k * k].reshape((k, k), order="F")
    us_raw = generic[k * k :].reshape((k_star, k_star), order="F")
    u, _ = polar_parts(u_raw)
    u_star, _ = polar_parts(us_raw)

    try:
        residual = check_coincidence(a, b, u, u_star)
    except NonUnitaryInput as e:
        logger.debug(f"重合搜索: 极分解后不是酉的 ({e})")
        return CoincidenceSearch(found=False, solution_dim=basis.shape[1], reason="解空间的一般元素不可逆")

    found = residual <= tol
    return CoincidenceSearch(
        found=found,
        u=u,
        u_star=u_star,
        residual=residual,
        solution_dim=basis.shape[1],
        reason="" if found else "验证残差超过容差",
    )
