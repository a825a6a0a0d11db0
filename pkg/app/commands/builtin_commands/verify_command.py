"""
验证指令
在实例文件或随机批量上运行检查套件
"""

from typing import Any, Dict, List

from ...formats.codec import load_instance
from ...formats.models import Report
from ...operators.errors import DilatoError
from ...verify.runner import run_batch
from ...verify.suites import Instance, batch_instances, expand_suites
from ..base_command import BaseCommand, CommandResponse, CommandResult, command_registry


class VerifyCommand(BaseCommand):
    """验证指令"""

    def __init__(self):
        super().__init__()
        self.name = "verify"
        self.description = "运行检查套件并汇总残差"
        self.usage = "verify [<instance>] [--random <count> --dim <n> --seed <s>] [--suite <name>] [--workers k]"
        self.example = """
    verify --random 50 --dim 4 --seed 1 --suite all
    verify inst.json --suite model
    verify scalar.json --suite uniqueness --format text"""
        self.aliases = ["check"]

    def _setup_parser(self):
        """设置参数解析器"""
        super()._setup_parser()
        self.parser.add_argument("input_path", nargs="?", default=None, help="实例文件")
        self.parser.add_argument("--random", dest="random_count", type=int, default=None, help="随机实例个数")
        self.parser.add_argument("--dim", type=int, default=3, help="随机实例维数")
        self.parser.add_argument("--seed", type=int, default=0, help="起始种子")
        self.parser.add_argument("--scheme", default=None, help="生成方案, 缺省为两种方案交替")
        self.parser.add_argument("--suite", default="all", help="schaffer, douglas, uniqueness, model, bcl 或 all")
        self.parser.add_argument("--workers", type=int, default=None, help="并发数")
        self._add_output_args()

    async def execute(self, args: List[str], context: Dict[str, Any]) -> CommandResponse:
        """执行验证指令"""
        logger = context["logger"]
        parsed = self.parse_args(args)
        if isinstance(parsed, str):
            return self.format_error(parsed)

        if parsed.input_path is None and parsed.random_count is None:
            return self.format_error("需要实例文件或 --random <count>")

        try:
            config = self.build_config(
                parsed,
                context,
                input_path=parsed.input_path,
                random_count=parsed.random_count,
                dim=parsed.dim,
                seed=parsed.seed,
                scheme=parsed.scheme,
                suite=parsed.suite,
                workers=parsed.workers,
            )
            if config.input_path is not None:
                pair = load_instance(config.input_path, config.tolerances.commute, config.tolerances.contraction)
                instances = [Instance(index=0, label=config.input_path, pair=pair, seed=config.seed)]
            else:
                instances = batch_instances(config.random_count, config.dim, config.seed, config.scheme)

            suites = expand_suites(config.suite)
            logger.verify.info(f"开始验证: {len(instances)} 个实例, 套件 {', '.join(suites)}")
            checks, summary = await run_batch(instances, suites, config)

            for check in checks:
                if check.status == "skip":
                    logger.verify.info(f"⚠️ 跳过 [{check.suite}] {check.instance}: {check.reason}")
                elif check.status == "error" or (check.status == "fail" and check.reason):
                    logger.verify.warning(f"❌ [{check.suite}] {check.instance}: {check.reason}")
                for rec in check.residuals:
                    if not rec.passed:
                        logger.log_residual(f"[{check.suite}] {rec.name}", rec.value, rec.tol, check.instance)

            failed = summary.failures + summary.errors
            status = "fail" if failed else ("skip" if summary.skipped == summary.checks else "pass")
            report = Report(command=self.name, status=status, summary=summary, checks=checks)
            self.emit(report, config)

            message = (
                f"{summary.instances} 个实例, {summary.checks} 项检查, 失败 {failed}, "
                f"跳过 {summary.skipped}, 耗时 {summary.elapsed_s:.2f}s"
            )
            if failed:
                return self.format_error(f"验证失败: {message}", CommandResult.FAILURE, report=report)
            if status == "skip":
                return self.format_warning(f"全部跳过: {message}", result=CommandResult.SKIPPED, report=report)
            return self.format_success(f"验证通过: {message}", report=report)
        except DilatoError as e:
            return self.format_dilato_error(e)
        except Exception as e:
            logger.error(f"验证失败: {e}")
            return self.format_error(f"验证失败: {e}")


# 注册指令
def register_verify_commands():
    """注册指令"""
    command_registry.register(VerifyCommand())

register_verify_commands()
