"""
指令系统模块
每个子命令一个指令类, 导入时注册到全局注册器
"""

from .base_command import BaseCommand, CommandResponse, CommandResult, command_registry
import os

BUILTIN_PATH = os.path.join(os.path.dirname(__file__), "builtin_commands")

def initialize_builtin_commands(logger):
    """初始化所有指令"""

    if not os.path.isdir(BUILTIN_PATH):
        logger.error("未找到内置指令目录")
        return

    for filename in sorted(os.listdir(BUILTIN_PATH)):
        if filename.endswith(".py") and not filename.startswith("__"):
            module_name = f"app.commands.builtin_commands.{filename[:-3]}"
            try:
                __import__(module_name)
            except ImportError as e:
                logger.error(f"注册内置指令 {module_name} 失败: {e}")

    logger.debug(f"已注册 {len(command_registry.commands)} 个内置指令")


__all__ = [
    "BaseCommand",
    "CommandResponse",
    "CommandResult",
    "command_registry",
    "initialize_builtin_commands"
]
