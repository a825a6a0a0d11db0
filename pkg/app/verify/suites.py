"""
检查套件
每个套件在一个实例上运行一组构造, 把各项残差与容差比较, 生成 CheckReport
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from ..config.config_validator import SUITE_NAMES, RunConfig, ToleranceConfig
from ..dilation.douglas import build_douglas_data, build_douglas_pair, douglas_residuals
from ..dilation.schaffer import build_schaffer_pair, schaffer_residuals
from ..formats.models import CheckReport, ResidualRecord
from ..model.characteristic import (
    boundary_innerness,
    char_coefficients,
    char_triple,
    check_coincidence,
    induced_unitaries,
)
from ..model.functional import admissible_check, functional_model, model_equivalence_report, transport_model
from ..model.uniqueness import (
    align_minimal_dilations,
    douglas_triple,
    forced_gram,
    full_schaffer_triple,
    krylov,
    schaffer_triple,
    verify_ut_membership,
)
from ..operators.ando import (
    bcl_coefficients,
    bcl_from_coefficients,
    bcl_shift_pair,
    build_ando_tuple,
    defect_range_ranks,
    fundamental_ops,
    random_bcl_data,
    solve_fund_eqs,
    tuple_residuals,
)
from ..operators.errors import DilatoError, GramMismatch, IdentityViolation, NotPure
from ..operators.linalg import adjoint, op_norm, random_unitary
from ..operators.pairs import (
    CommutingPair,
    GenerationScheme,
    asymptotic_limit,
    random_pair,
    random_unitary_pair,
)

logger = logging.getLogger("Dilato.Verify")

# Krylov 对齐的深度
ALIGN_DEPTH = 4
# bcl 套件中截断 BCL 乘法算子对的规模
BCL_SHIFT_DIM = 2
BCL_SHIFT_DEGREE = 3
# 随机批量中 poly 方案实例的谱半径上限, 使纯情形的截断次数不超过上限
BATCH_SPECTRAL_RADIUS = 0.9
# 内部子空间上的等距与交换, 以及单位圆上的上确界, 相对基础容差的放宽倍数
INTERIOR_FACTOR = 100
INNERNESS_FACTOR = 10


@dataclass
class Instance:
    """批量中的一个实例"""

    index: int
    label: str
    pair: CommutingPair
    seed: int = 0


class ResidualSheet:
    """累积一个套件在一个实例上的残差"""

    def __init__(self, suite: str, instance: Instance):
        self.report = CheckReport(suite=suite, instance=instance.label, index=instance.index)

    def add(self, name: str, value: float, tol: float) -> bool:
        value = float(value)
        # NaN 不通过
        passed = bool(value <= tol)
        self.report.residuals.append(ResidualRecord(name, value, float(tol), passed))
        return passed

    def add_all(self, values: Dict[str, float], tols: Dict[str, float], prefix: str = "") -> None:
        for name, tol in tols.items():
            self.add(prefix + name, values[name], tol)

    def note(self, key: str, value) -> None:
        if isinstance(value, (bool, np.bool_)):
            value = bool(value)
        elif isinstance(value, (int, np.integer)):
            value = int(value)
        elif isinstance(value, (float, np.floating)):
            value = float(value)
        self.report.info[key] = value

    def skip(self, reason: str) -> CheckReport:
        self.report.status = "skip"
        self.report.reason = reason
        return self.report

    def abort(self, error: Exception) -> CheckReport:
        if isinstance(error, DilatoError):
            self.report.status = "fail" if error.exit_code == 1 else "error"
            self.report.reason = f"{type(error).__name__}: {error}"
        else:
            self.report.status = "error"
            self.report.reason = f"{type(error).__name__}: {error}"
        return self.report

    def finish(self) -> CheckReport:
        if any(not rec.passed for rec in self.report.residuals):
            self.report.status = "fail"
        return self.report


def _schaffer_tolerances(t: ToleranceConfig) -> Dict[str, float]:
    interior = INTERIOR_FACTOR * t.commute
    return {
        "isometry_v1": interior,
        "isometry_v2": interior,
        "commutation": interior,
        "dilation_v1": t.bookkeeping,
        "dilation_v2": t.bookkeeping,
        "product_block": t.identity,
        "compression_vs": t.identity,
        "fund_eq_1": t.identity,
        "fund_eq_2": t.identity,
        "s_assembly": t.identity,
        "part_s_relations": t.identity,
        "s_contraction": t.identity,
    }


def _douglas_tolerances(t: ToleranceConfig) -> Dict[str, float]:
    interior = INTERIOR_FACTOR * t.commute
    return {
        "x_unitarity": t.douglas,
        "x_factorization": t.douglas,
        "x_relation": t.douglas,
        "row_recursion_1": t.douglas,
        "row_recursion_2": t.douglas,
        "intertwine_v1": t.douglas,
        "intertwine_v2": t.douglas,
        "product_compression": t.douglas,
        "pi_d_isometry_deficit_max": t.bookkeeping,
        "boundary_unitarity": t.identity,
        "isometry_v1": interior,
        "isometry_v2": interior,
        "commutation": interior,
        "pi_tilde_rank_gap": 0.0,
    }


def _membership_tolerances(t: ToleranceConfig) -> Dict[str, float]:
    keys = ("dilation_1", "dilation_2", "dilation_product", "pi_isometry", "commute_1", "commute_2", "factor_relation")
    return {key: t.douglas for key in keys}


def check_schaffer(instance: Instance, config: RunConfig, sheet: ResidualSheet) -> None:
    """Andô 元组, BCL 系数, 基本算子与 Schäffer 膨胀"""
    pair = instance.pair
    t = config.tolerances
    tup = build_ando_tuple(pair)
    laws = tuple_residuals(pair, tup)
    sheet.add_all(laws, dict.fromkeys(laws, t.identity))
    identities = bcl_coefficients(tup).residuals()
    sheet.add_all(identities, dict.fromkeys(identities, t.identity), "bcl_")

    fund = fundamental_ops(pair, tup, config.grid)
    oracle = solve_fund_eqs(pair, config.grid)
    sheet.add("fund_oracle", max(op_norm(fund.f1 - oracle.f1), op_norm(fund.f2 - oracle.f2)), INTERIOR_FACTOR * t.identity)
    sheet.add("radius_excess", max(0.0, fund.radii[0] - 1.0, fund.radii[1] - 1.0), INTERIOR_FACTOR * t.contraction)

    dil = build_schaffer_pair(pair, tup, config.degree_bound)
    values = schaffer_residuals(pair, tup, dil, fund, config.grid)
    sheet.add_all(values, _schaffer_tolerances(t))
    for name in ("phi_sup", "psi_sup"):
        sheet.add(f"{name}_excess", max(0.0, values[name] - 1.0), INTERIOR_FACTOR * t.contraction)
        sheet.note(name, values[name])
    sheet.note("top_degree_deficit", values["top_degree_deficit"])
    sheet.note("dim_f", dil.f_dim)
    sheet.note("dim_defect", dil.k_t)
    sheet.note("degree", dil.n)


def check_douglas(instance: Instance, config: RunConfig, sheet: ResidualSheet) -> None:
    """Douglas 数据与 Douglas 膨胀, 截断次数自适应"""
    pair = instance.pair
    data = build_douglas_data(pair, config.asymptotic_tol, config.asymptotic_max_iter)
    dil = build_douglas_pair(
        pair,
        data,
        config.degree_bound,
        adaptive=True,
        max_degree=config.max_degree,
        tail_tol=config.tolerances.tail,
    )
    sheet.add_all(douglas_residuals(pair, data, dil), _douglas_tolerances(config.tolerances))
    sheet.note("degree", dil.n)
    sheet.note("tail", dil.tail)
    sheet.note("dim_r", dil.r_dim)
    sheet.note("x_repaired", data.repaired)


def check_uniqueness(instance: Instance, config: RunConfig, sheet: ResidualSheet) -> None:
    """两个极小膨胀属于 U_T, Gram 矩阵由 T 决定, 并在 Krylov 向量上对齐"""
    pair = instance.pair
    t = config.tolerances
    n = max(config.degree_bound, ALIGN_DEPTH)
    schaffer = schaffer_triple(pair, n)
    douglas = douglas_triple(pair, config.degree_bound, ALIGN_DEPTH, config.max_degree, t.tail)

    tols = _membership_tolerances(t)
    for triple in (schaffer, douglas):
        report = verify_ut_membership(triple, pair)
        sheet.add_all(report, tols, f"{triple.name}_")
        sheet.note(f"{triple.name}_krylov_rank", report["krylov_rank"])
        sheet.note(f"{triple.name}_minimal", report["minimal"])
        span = krylov(triple, ALIGN_DEPTH)
        sheet.add(f"gram_forcing_{triple.name}", op_norm(adjoint(span) @ span - forced_gram(pair.t, ALIGN_DEPTH)), t.douglas)

    try:
        _, residual = align_minimal_dilations(pair, schaffer, douglas, ALIGN_DEPTH, t.gram)
        sheet.add("omega_intertwining", residual, t.align)
    except GramMismatch as e:
        sheet.add("gram_mismatch", e.residual if e.residual is not None else np.inf, t.gram)

    tup = build_ando_tuple(pair)
    adjoint_surjective = build_ando_tuple(pair.adjoint()).is_surjective
    sheet.note("lambda_surjective", tup.is_surjective)
    sheet.note("gamma_surjective", adjoint_surjective)
    if tup.is_surjective and adjoint_surjective:
        # 正则分解时完整的 Schäffer 膨胀本身也是极小的
        full = full_schaffer_triple(pair, n)
        try:
            _, residual = align_minimal_dilations(pair, full, douglas, ALIGN_DEPTH, t.gram)
            sheet.add("omega_full_intertwining", residual, t.align)
        except GramMismatch as e:
            sheet.add("gram_mismatch_full", e.residual if e.residual is not None else np.inf, t.gram)


def check_model(instance: Instance, config: RunConfig, sheet: ResidualSheet) -> None:
    """
    纯情形的函数模型, 容许性, 边界内性与重合

    Raises:
        NotPure: 实例含有酉部分, 套件跳过
    """
    pair = instance.pair
    t = config.tolerances
    if not asymptotic_limit(pair.t, config.asymptotic_tol, config.asymptotic_max_iter).pure:
        raise NotPure("T 不是纯压缩, 函数模型只适用于纯情形")

    data = build_douglas_data(pair, config.asymptotic_tol, config.asymptotic_max_iter)
    triple = char_triple(pair, data)
    fm = functional_model(triple, config.degree_bound, config.max_degree)
    report = model_equivalence_report(pair, fm)
    sheet.add("isometry", report["isometry"], fm.tolerance)
    for name in ("intertwine_1", "intertwine_2", "intertwine_product", "range", "product_relation"):
        sheet.add(name, report[name], t.model)
    sheet.note("degree", fm.n)
    sheet.note("power_norm", fm.power_norm)

    sigma_min, _ = boundary_innerness(triple.theta)
    sheet.add("innerness_deficit", max(0.0, 1.0 - sigma_min), INNERNESS_FACTOR * t.model)

    adm = admissible_check(triple.g1, triple.g2, char_coefficients(triple.theta, fm.n), fm.n, config.grid, t.model)
    for name in ("invariance_phi", "invariance_psi", "backward_phi_psi", "backward_psi_phi"):
        sheet.add(f"admissible_{name}", adm[name], t.model)
    sheet.add("admissible_phi_excess", max(0.0, adm["phi_sup"] - 1.0), INTERIOR_FACTOR * t.contraction)
    sheet.add("admissible_psi_excess", max(0.0, adm["psi_sup"] - 1.0), INTERIOR_FACTOR * t.contraction)
    sheet.note("q_dim", int(adm["q_dim"]))

    # 酉共轭后的实例: 诱导的 (u, u_*) 是重合见证, 且在函数模型之间搬运
    omega = random_unitary(pair.dim, np.random.default_rng(instance.seed))
    other = pair.conjugated(omega)
    other_triple = char_triple(other)
    u, u_star = induced_unitaries(triple, other_triple, omega)
    sheet.add("coincidence", check_coincidence(triple, other_triple, u, u_star), t.douglas)
    other_fm = functional_model(other_triple, fm.n, config.max_degree)
    if other_fm.n == fm.n:
        sheet.add("model_transport", transport_model(fm, other_fm, u_star), t.model)
    else:
        sheet.note("model_transport", f"截断次数不同 ({fm.n} 与 {other_fm.n}), 未比较")


def check_bcl(instance: Instance, config: RunConfig, sheet: ResidualSheet) -> None:
    """BCL 系数往返, 截断 BCL 乘法算子对上的 Douglas 构造, 亏值域秩"""
    pair = instance.pair
    t = config.tolerances
    tup = build_ando_tuple(pair)
    bcl = bcl_coefficients(tup)
    try:
        p, u = bcl_from_coefficients(bcl.e1, bcl.e2, t.identity)
        sheet.add("p_recovery", op_norm(p - tup.p), t.identity)
        sheet.add("u_recovery", op_norm(u - tup.u), t.identity)
    except IdentityViolation as e:
        sheet.add("round_trip", e.residual if e.residual is not None else np.inf, t.identity)

    p, u = random_bcl_data(pair.dim, instance.seed)
    eye = np.eye(pair.dim)
    e1, e2 = (eye - p) @ u, adjoint(u) @ p
    p_back, u_back = bcl_from_coefficients(e1, e2, t.identity)
    sheet.add("random_round_trip", max(op_norm(p_back - p), op_norm(u_back - u)), t.identity)

    p, u = random_bcl_data(BCL_SHIFT_DIM, instance.seed)
    eye = np.eye(BCL_SHIFT_DIM)
    shift_pair = bcl_shift_pair((eye - p) @ u, adjoint(u) @ p, BCL_SHIFT_DEGREE)
    data = build_douglas_data(shift_pair, config.asymptotic_tol, config.asymptotic_max_iter)
    dil = build_douglas_pair(shift_pair, data, config.degree_bound, max_degree=config.max_degree, tail_tol=t.tail)
    sheet.add_all(douglas_residuals(shift_pair, data, dil), _douglas_tolerances(t), "shift_")
    # 截断不影响 V_i V_i^H, 亏空间只在零次块上, 秩与目标都等于 BCL_SHIFT_DIM
    ranks = defect_range_ranks(shift_pair.t1, shift_pair.t2)
    sheet.add("shift_defect_rank_gap", abs(ranks.rank - ranks.target), 0.0)
    sheet.note("shift_defect_rank", ranks.rank)

    unitary = random_unitary_pair(pair.dim, instance.seed)
    ranks = defect_range_ranks(unitary.t1, unitary.t2)
    sheet.add("unitary_defect_rank_gap", abs(ranks.rank - ranks.target), 0.0)


SUITES: Dict[str, Callable[[Instance, RunConfig, ResidualSheet], None]] = {
    "schaffer": check_schaffer,
    "douglas": check_douglas,
    "uniqueness": check_uniqueness,
    "model": check_model,
    "bcl": check_bcl,
}


def expand_suites(name: str) -> List[str]:
    return list(SUITE_NAMES) if name == "all" else [name]


def run_suite(suite: str, instance: Instance, config: RunConfig) -> CheckReport:
    """运行一个套件; 异常转为 fail/error/skip 状态而不向外传播"""
    sheet = ResidualSheet(suite, instance)
    try:
        SUITES[suite](instance, config, sheet)
    except NotPure as e:
        logger.debug(f"跳过 [{suite}] {instance.label}: {e}")
        return sheet.skip(str(e))
    except DilatoError as e:
        logger.warning(f"[{suite}] {instance.label} 失败: {e}")
        return sheet.abort(e)
    except Exception as e:
        logger.error(f"[{suite}] {instance.label} 出现异常: {e}")
        return sheet.abort(e)
    return sheet.finish()


def batch_instances(
    count: int,
    dim: int,
    seed: int,
    scheme: Optional[str] = None,
) -> List[Instance]:
    """
    批量随机实例, 第 i 个实例的种子为 seed + i

    未指定方案时两种方案交替; poly 方案的实例缩放到谱半径不超过 0.9
    """
    schemes = list(GenerationScheme)
    instances = []
    for i in range(count):
        s = seed + i
        chosen = GenerationScheme.parse(scheme) if scheme else schemes[i % len(schemes)]
        radius = BATCH_SPECTRAL_RADIUS if chosen is GenerationScheme.POLY_IN_ONE_MATRIX else None
        pair = random_pair(dim, s, chosen, max_spectral_radius=radius)
        instances.append(Instance(index=i, label=f"seed={s} {chosen.value}", pair=pair, seed=s))
    return instances
