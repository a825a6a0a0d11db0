"""
特征函数指令
输出 Theta_T 的采样值, 特征三元组, 重合检查与绘图数据
"""

from typing import Any, Dict, List

from ...config.config_validator import RunConfig
from ...dilation.douglas import build_douglas_data
from ...formats.codec import load_instance, matrix_to_wire, write_plot_csv
from ...formats.models import CheckReport, Report, ResidualRecord
from ...model.characteristic import (
    CharTriple,
    boundary_innerness,
    boundary_profile,
    char_coefficients,
    char_eval,
    char_triple,
    defect_intertwining,
    interior_samples,
    search_coincidence,
)
from ...operators.errors import DilatoError
from ...operators.pairs import CommutingPair, asymptotic_limit
from ..base_command import BaseCommand, CommandResponse, CommandResult, command_registry

SAMPLE_ANGLES = 8
INNERNESS_FACTOR = 10


def _triple(pair: CommutingPair, config: RunConfig) -> CharTriple:
    return char_triple(pair, build_douglas_data(pair, config.asymptotic_tol, config.asymptotic_max_iter))


def _record(name: str, value: float, tol: float) -> ResidualRecord:
    return ResidualRecord(name, float(value), float(tol), bool(value <= tol))


class CharCommand(BaseCommand):
    """特征函数指令"""

    def __init__(self):
        super().__init__()
        self.name = "char"
        self.description = "计算特征函数与特征三元组, 或比较两个实例的特征三元组是否重合"
        self.usage = "char <instance> [--emit-plot-data file.csv] | char --compare <a> <b>"
        self.example = """
    char scalar.json --format text
    char inst.json --emit-plot-data theta.csv
    char --compare inst.json conjugated.json"""
        self.aliases = ["theta"]

    def _setup_parser(self):
        """设置参数解析器"""
        super()._setup_parser()
        self.parser.add_argument("input_path", nargs="?", default=None, help="实例文件")
        self.parser.add_argument("--compare", nargs=2, default=None, metavar=("A", "B"), help="比较两个实例")
        self.parser.add_argument("--emit-plot-data", dest="plot_path", default=None, help="写出单位圆上奇异值的 CSV")
        self.parser.add_argument("--seed", type=int, default=0, help="重合搜索的随机种子")
        self._add_output_args()

    def _describe(self, path: str, pair: CommutingPair, config: RunConfig) -> CheckReport:
        triple = _triple(pair, config)
        cf = triple.theta
        t = config.tolerances
        check = CheckReport(suite="char", instance=path)
        check.residuals.append(_record("defect_intertwining", defect_intertwining(cf), t.identity))

        pure = asymptotic_limit(pair.t, config.asymptotic_tol, config.asymptotic_max_iter).pure
        check.info = {
            "shape": list(cf.shape),
            "pure": pure,
            "theta_at_zero": matrix_to_wire(char_eval(cf, 0.0)),
            "g1": matrix_to_wire(triple.g1),
            "g2": matrix_to_wire(triple.g2),
            "coefficients": [matrix_to_wire(c) for c in char_coefficients(cf, config.degree_bound)],
            "samples": [
                {"z": [float(z.real), float(z.imag)], "theta": matrix_to_wire(char_eval(cf, z))}
                for z in interior_samples(SAMPLE_ANGLES)
            ],
        }
        if pure:
            sigma_min, deviation = boundary_innerness(cf)
            check.residuals.append(_record("innerness_deficit", max(0.0, 1.0 - sigma_min), INNERNESS_FACTOR * t.model))
            check.info["boundary_sigma_min"] = sigma_min
            check.info["boundary_unitarity"] = deviation

        if config.plot_path:
            thetas, svals = boundary_profile(cf)
            write_plot_csv(config.plot_path, thetas, svals)
            check.info["plot_data"] = config.plot_path

        if any(not rec.passed for rec in check.residuals):
            check.status = "fail"
        return check

    def _compare(self, paths: List[str], config: RunConfig) -> CheckReport:
        t = config.tolerances
        a = _triple(load_instance(paths[0], t.commute, t.contraction), config)
        b = _triple(load_instance(paths[1], t.commute, t.contraction), config)
        search = search_coincidence(a, b, seed=config.seed, tol=config.tolerances.douglas)

        check = CheckReport(suite="coincidence", instance=f"{paths[0]} ~ {paths[1]}")
        check.info = {
            "found": search.found,
            "solution_dim": search.solution_dim,
            "outcome": "found" if search.found else "not found",
        }
        if search.found:
            check.residuals.append(_record("coincidence", search.residual, config.tolerances.douglas))
            check.info["u"] = matrix_to_wire(search.u)
            check.info["u_star"] = matrix_to_wire(search.u_star)
        else:
            check.reason = search.reason
        return check

    async def execute(self, args: List[str], context: Dict[str, Any]) -> CommandResponse:
        """执行特征函数指令"""
        logger = context["logger"]
        parsed = self.parse_args(args)
        if isinstance(parsed, str):
            return self.format_error(parsed)

        if parsed.input_path is None and parsed.compare is None:
            return self.format_error("需要实例文件或 --compare <a> <b>")

        try:
            config = self.build_config(
                parsed,
                context,
                input_path=parsed.input_path,
                compare=parsed.compare,
                plot_path=parsed.plot_path,
                seed=parsed.seed,
            )
            if config.compare:
                check = self._compare(config.compare, config)
            else:
                pair = load_instance(config.input_path, config.tolerances.commute, config.tolerances.contraction)
                check = self._describe(config.input_path, pair, config)

            for rec in check.residuals:
                logger.log_residual(rec.name, rec.value, rec.tol, check.instance, level="debug")

            report = Report(command=self.name, status=check.status, checks=[check])
            self.emit(report, config)

            if check.status == "fail":
                return self.format_error("特征函数检查失败", CommandResult.FAILURE, report=report)
            if check.suite == "coincidence":
                return self.format_info(f"重合搜索: {check.info['outcome']}", report=report)
            return self.format_success(f"特征函数 {check.info['shape']} 计算完成", report=report)
        except DilatoError as e:
            return self.format_dilato_error(e)
        except Exception as e:
            logger.error(f"计算特征函数失败: {e}")
            return self.format_error(f"计算特征函数失败: {e}")


# 注册指令
def register_char_commands():
    """注册指令"""
    command_registry.register(CharCommand())

register_char_commands()
