#!/usr/bin/env python3
"""
dilato
交换压缩对的 Andô 膨胀构造与验证工具

命令行入口 - 用于 uv run dilato 命令
"""

import argparse
import asyncio
import sys
from typing import List, Optional, Tuple

from app import __description__, __version__
from app.commands import command_registry, initialize_builtin_commands
from app.commands.base_command import CommandResult
from app.config.config_manager import ConfigManager
from app.operators.errors import DilatoError
from app.utils.logger import DilatoLogger

# 带取值的全局参数
GLOBAL_VALUE_FLAGS = ("--config", "--log-level")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _global_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dilato", description=__description__, add_help=False)
    parser.add_argument("--config", default=None, help="全局配置文件, 缺省为 config/dilato.json")
    parser.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, default=None, help="日志级别")
    parser.add_argument("--no-log-file", action="store_true", help="不写日志文件")
    parser.add_argument("--version", action="store_true", help="显示版本")
    parser.add_argument("-h", "--help", action="store_true", help="显示帮助")
    return parser


def _split_argv(argv: List[str]) -> Tuple[List[str], List[str]]:
    """全局参数必须位于子命令之前"""
    i = 0
    while i < len(argv) and argv[i].startswith("-"):
        i += 2 if argv[i] in GLOBAL_VALUE_FLAGS else 1
    return argv[:i], argv[i:]


def _usage() -> str:
    lines = [f"dilato {__version__} - {__description__}", "", "用法: dilato [全局参数] <指令> [参数]", "", "指令:"]
    for command in command_registry.get_all_commands():
        lines.append(f"  {command.name:<10}{command.description}")
    lines.append("")
    lines.append(_global_parser().format_help())
    return "\n".join(lines)


def run_cli(argv: Optional[List[str]] = None) -> int:
    """运行一次命令, 返回退出码: 0 通过或跳过, 1 断言失败, 2 输入错误"""
    argv = list(sys.argv[1:] if argv is None else argv)
    head, tail = _split_argv(argv)
    try:
        opts = _global_parser().parse_args(head)
    except SystemExit:
        return CommandResult.INPUT_ERROR.exit_code

    if opts.version:
        print(f"dilato {__version__}")
        return 0

    # 初始化配置管理器
    config_manager = ConfigManager()
    try:
        global_config = config_manager.load(opts.config)
    except DilatoError as e:
        print(f"❌ {e}", file=sys.stderr)
        return e.exit_code

    if opts.no_log_file:
        global_config["logging"]["to_file"] = False
    if opts.log_level:
        global_config["logging"]["level"] = opts.log_level

    # 设置日志系统
    logger = DilatoLogger(global_config)
    config_manager.set_logger(logger)

    # 初始化指令系统
    initialize_builtin_commands(logger)

    if opts.help or not tail:
        print(_usage())
        return 0 if opts.help else CommandResult.INPUT_ERROR.exit_code

    name, args = tail[0], tail[1:]
    command = command_registry.get_command(name)
    if command is None:
        logger.error(f"未知的指令: {name}")
        print(_usage(), file=sys.stderr)
        return CommandResult.INPUT_ERROR.exit_code

    if args and args[0] in ("-h", "--help"):
        print(command.get_help())
        return 0

    response = asyncio.run(command.execute(args, {"logger": logger, "config_manager": config_manager}))
    if response.result is CommandResult.SUCCESS:
        logger.info(response.message)
    elif response.result is CommandResult.SKIPPED:
        logger.warning(response.message)
    else:
        logger.error(response.message)
    return response.result.exit_code


def _cli_entrypoint():
    """CLI 入口点 - 同步函数供 uv 调用"""
    try:
        sys.exit(run_cli())
    except KeyboardInterrupt:
        print("\n已中断")
        sys.exit(130)


if __name__ == "__main__":
    _cli_entrypoint()
