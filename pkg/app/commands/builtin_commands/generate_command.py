"""
生成指令
生成随机交换压缩对实例文件
"""

from typing import Any, Dict, List

from ...formats.codec import encode_instance, pair_to_instance, save_instance, write_output
from ...operators.errors import DilatoError
from ...operators.pairs import GenerationScheme, random_pair
from ..base_command import BaseCommand, CommandResponse, command_registry


class GenerateCommand(BaseCommand):
    """生成指令"""

    def __init__(self):
        super().__init__()
        self.name = "generate"
        self.description = "生成随机交换压缩对 (pair-v1 实例文件)"
        self.usage = "generate --dim <n> --seed <s> [--scheme poly|diag] [--spectral-radius r] [--out file]"
        self.example = """
    generate --dim 3 --seed 7 --scheme poly --out inst.json
    generate --dim 1 --seed 0"""
        self.aliases = ["gen"]

    def _setup_parser(self):
        """设置参数解析器"""
        super()._setup_parser()
        self.parser.add_argument("--dim", type=int, default=3, help="维数")
        self.parser.add_argument("--seed", type=int, default=0, help="随机种子")
        self.parser.add_argument("--scheme", default="poly", help="生成方案: poly 或 diag")
        self.parser.add_argument("--spectral-radius", type=float, default=None, help="T = T1 T2 的谱半径上限")
        self.parser.add_argument("--out", dest="output_path", default=None, help="实例文件路径, 缺省为标准输出")

    async def execute(self, args: List[str], context: Dict[str, Any]) -> CommandResponse:
        """执行生成指令"""
        logger = context["logger"]
        parsed = self.parse_args(args)
        if isinstance(parsed, str):
            return self.format_error(parsed)

        try:
            config = self.build_config(parsed, context, dim=parsed.dim, seed=parsed.seed, scheme=parsed.scheme)
            scheme = GenerationScheme.parse(config.scheme)
            pair = random_pair(config.dim, config.seed, scheme, max_spectral_radius=parsed.spectral_radius)

            if config.output_path:
                save_instance(config.output_path, pair, seed=config.seed, scheme=scheme.value)
                logger.io.info(f"已写入实例文件: {config.output_path}")
            else:
                write_output(encode_instance(pair_to_instance(pair, config.seed, scheme.value)))

            message = (
                f"dim = {pair.dim}, 交换子残差 {pair.commutator_residual:.3e}, "
                f"压缩余量 {pair.contraction_slack:.3e}"
            )
            logger.verify.info(f"✅ 生成完成: {message}")
            return self.format_success(
                message,
                data={
                    "commutator_residual": pair.commutator_residual,
                    "contraction_slack": pair.contraction_slack,
                },
            )
        except DilatoError as e:
            return self.format_dilato_error(e)
        except Exception as e:
            logger.error(f"生成实例失败: {e}")
            return self.format_error(f"生成实例失败: {e}")


# 注册指令
def register_generate_commands():
    """注册指令"""
    command_registry.register(GenerateCommand())

register_generate_commands()
