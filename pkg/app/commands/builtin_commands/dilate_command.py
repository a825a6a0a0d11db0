"""
膨胀指令
对实例构造 Schäffer 或 Douglas 膨胀, 输出矩阵与残差报告
"""

from typing import Any, Dict, List

from ...config.config_validator import RunConfig
from ...dilation.douglas import build_douglas_data, build_douglas_pair
from ...dilation.schaffer import build_schaffer_pair
from ...formats.codec import load_instance, matrix_to_wire
from ...formats.models import Report
from ...operators.ando import build_ando_tuple
from ...operators.errors import DilatoError
from ...operators.pairs import CommutingPair
from ...verify.suites import Instance, run_suite
from ..base_command import BaseCommand, CommandResponse, CommandResult, command_registry


def schaffer_matrices(pair: CommutingPair, config: RunConfig) -> Dict[str, Any]:
    dil = build_schaffer_pair(pair, build_ando_tuple(pair), config.degree_bound)
    return {
        "model": "schaffer",
        "degree": dil.n,
        "space_dim": dil.space_dim,
        "dim_f": dil.f_dim,
        "v1": matrix_to_wire(dil.v1),
        "v2": matrix_to_wire(dil.v2),
        "vs": matrix_to_wire(dil.vs),
        "pi_lambda": matrix_to_wire(dil.pi_lambda),
    }


def douglas_matrices(pair: CommutingPair, config: RunConfig) -> Dict[str, Any]:
    data = build_douglas_data(pair, config.asymptotic_tol, config.asymptotic_max_iter)
    dil = build_douglas_pair(
        pair,
        data,
        config.degree_bound,
        max_degree=config.max_degree,
        tail_tol=config.tolerances.tail,
    )
    return {
        "model": "douglas",
        "degree": dil.n,
        "space_dim": dil.space_dim,
        "hardy_dim": dil.n * dil.f_star,
        "dim_r": dil.r_dim,
        "tail": dil.tail,
        "v1": matrix_to_wire(dil.v1d),
        "v2": matrix_to_wire(dil.v2d),
        "pi_d": matrix_to_wire(dil.pi_d),
        "x": matrix_to_wire(data.x),
    }


class DilateCommand(BaseCommand):
    """膨胀指令"""

    def __init__(self):
        super().__init__()
        self.name = "dilate"
        self.description = "构造 Andô 膨胀并检查其残差"
        self.usage = "dilate <instance> [--model schaffer|douglas] [-N n] [--tol t] [--format json|text] [--out file]"
        self.example = """
    dilate inst.json --model schaffer -N 12
    dilate unitary.json --model douglas --format text"""
        self.aliases = ["dil"]

    def _setup_parser(self):
        """设置参数解析器"""
        super()._setup_parser()
        self.parser.add_argument("input_path", help="实例文件")
        self.parser.add_argument("--model", default="schaffer", help="膨胀模型: schaffer 或 douglas")
        self._add_output_args()

    async def execute(self, args: List[str], context: Dict[str, Any]) -> CommandResponse:
        """执行膨胀指令"""
        logger = context["logger"]
        parsed = self.parse_args(args)
        if isinstance(parsed, str):
            return self.format_error(parsed)

        try:
            config = self.build_config(parsed, context, input_path=parsed.input_path, model=parsed.model)
            pair = load_instance(config.input_path, config.tolerances.commute, config.tolerances.contraction)

            check = run_suite(config.model, Instance(index=0, label=config.input_path, pair=pair), config)
            for rec in check.residuals:
                logger.log_residual(rec.name, rec.value, rec.tol, config.input_path, level="debug")

            data = {}
            if check.status not in ("fail", "error"):
                builder = schaffer_matrices if config.model == "schaffer" else douglas_matrices
                data = builder(pair, config)

            report = Report(command=self.name, status=check.status, checks=[check], data=data)
            self.emit(report, config)

            if check.status in ("fail", "error"):
                failed = [rec.name for rec in check.residuals if not rec.passed]
                detail = check.reason or ", ".join(failed)
                return self.format_error(f"{config.model} 膨胀检查失败: {detail}", CommandResult.FAILURE, report=report)
            return self.format_success(
                f"{config.model} 膨胀检查通过 ({len(check.residuals)} 项残差)", report=report
            )
        except DilatoError as e:
            return self.format_dilato_error(e)
        except Exception as e:
            logger.error(f"构造膨胀失败: {e}")
            return self.format_error(f"构造膨胀失败: {e}")


# 注册指令
def register_dilate_commands():
    """注册指令"""
    command_registry.register(DilateCommand())

register_dilate_commands()
