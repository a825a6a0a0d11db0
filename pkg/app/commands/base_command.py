"""
指令基类
定义子命令的基础结构和接口
"""

import argparse
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Union

from ..config.config_validator import RunConfig
from ..formats.codec import encode_report, write_output
from ..formats.models import Report
from ..operators.errors import DilatoError


class CommandResult(Enum):
    """指令执行结果"""
    SUCCESS = "success"
    SKIPPED = "skipped"
    FAILURE = "failure"
    INPUT_ERROR = "input_error"

    @property
    def exit_code(self) -> int:
        return {
            CommandResult.SUCCESS: 0,
            CommandResult.SKIPPED: 0,
            CommandResult.FAILURE: 1,
            CommandResult.INPUT_ERROR: 2,
        }[self]

    @classmethod
    def from_exit_code(cls, code: int) -> "CommandResult":
        return {0: cls.SKIPPED, 1: cls.FAILURE}.get(code, cls.INPUT_ERROR)


@dataclass
class CommandResponse:
    """指令响应"""
    result: CommandResult
    message: str
    report: Optional[Report] = None
    data: Optional[Dict[str, Any]] = None


class BaseCommand(ABC):
    """指令基类"""

    def __init__(self):
        self.name = ""
        self.description = ""
        self.usage = ""
        self.example = ""
        self.aliases = []

        # 参数解析器
        self.parser = None
        self._setup_parser()

    @abstractmethod
    def _setup_parser(self):
        """设置参数解析器"""
        self.parser = argparse.ArgumentParser(
            prog=f"dilato {self.name}",
            description=self.description,
            add_help=False
        )

    def _add_output_args(self):
        """报告相关的公共参数"""
        self.parser.add_argument("-N", "--degree", type=int, default=None, help="截断次数 N")
        self.parser.add_argument("--tol", type=float, default=None, help="统一覆盖所有断言容差")
        self.parser.add_argument("--format", dest="report_format", choices=["json", "text"], default="json", help="报告格式")
        self.parser.add_argument("--out", dest="output_path", default=None, help="输出文件, 缺省为标准输出")

    @abstractmethod
    async def execute(self, args: List[str], context: Dict[str, Any]) -> CommandResponse:
        """执行指令"""
        pass

    def parse_args(self, args: List[str]) -> Union[argparse.Namespace, str]:
        """解析参数"""
        try:
            return self.parser.parse_args(args)
        except SystemExit:
            return self.get_help()
        except Exception as e:
            return f"参数解析错误: {e}"

    def get_help(self) -> str:
        """获取帮助信息"""
        help_text = f"指令: {self.name}\n"
        help_text += f"描述: {self.description}\n"
        if self.usage:
            help_text += f"用法: {self.usage}\n"
        if self.example:
            help_text += f"示例: {self.example}\n"
        if self.aliases:
            help_text += "别名: {}\n".format(', '.join(self.aliases))

        # 添加参数帮助
        if self.parser:
            help_text += "\n参数说明:\n"
            help_text += self.parser.format_help()

        return help_text

    def build_config(self, parsed: argparse.Namespace, context: Dict[str, Any], **extra) -> RunConfig:
        """
        由命令行参数与全局配置生成运行配置

        Raises:
            InvalidConfig: 参数不合法
        """
        overrides = {
            "degree_bound": getattr(parsed, "degree", None),
            "tol": getattr(parsed, "tol", None),
            "report_format": getattr(parsed, "report_format", None),
            "output_path": getattr(parsed, "output_path", None),
        }
        overrides.update(extra)
        return context["config_manager"].build_run_config(self.name, overrides)

    def emit(self, report: Report, config: RunConfig) -> None:
        """按运行配置写出报告"""
        write_output(encode_report(report, config.report_format.value), config.output_path)

    def format_response(self, message: str, result: CommandResult = CommandResult.SUCCESS,
                        report: Optional[Report] = None,
                        data: Optional[Dict[str, Any]] = None) -> CommandResponse:
        """格式化响应"""
        return CommandResponse(result=result, message=message, report=report, data=data)

    def format_error(self, message: str,
                     result: CommandResult = CommandResult.INPUT_ERROR, **kwargs) -> CommandResponse:
        """格式化错误响应"""
        return self.format_response(f"❌ {message}", result, **kwargs)

    def format_success(self, message: str, **kwargs) -> CommandResponse:
        """格式化成功响应"""
        return self.format_response(f"✅ {message}", CommandResult.SUCCESS, **kwargs)

    def format_info(self, message: str, **kwargs) -> CommandResponse:
        """格式化信息响应"""
        return self.format_response(f"ℹ️ {message}", **kwargs)

    def format_warning(self, message: str, **kwargs) -> CommandResponse:
        """格式化警告响应"""
        return self.format_response(f"⚠️ {message}", **kwargs)

    def format_dilato_error(self, error: DilatoError) -> CommandResponse:
        """按异常的 exit_code 生成响应"""
        result = CommandResult.from_exit_code(error.exit_code)
        if result is CommandResult.SKIPPED:
            return self.format_warning(f"跳过: {error}", result=result)
        return self.format_error(f"{type(error).__name__}: {error}", result)


class CommandRegistry:
    """指令注册器"""

    def __init__(self):
        self.commands: Dict[str, BaseCommand] = {}
        self.aliases: Dict[str, str] = {}  # alias -> command_name

    def register(self, command: BaseCommand):
        """注册指令"""
        if not command.name:
            raise ValueError("指令名称不能为空")

        if command.name in self.commands:
            raise ValueError(f"指令 {command.name} 已存在")

        self.commands[command.name] = command

        # 注册别名
        for alias in command.aliases:
            if alias in self.aliases:
                raise ValueError(f"别名 {alias} 已被指令 {self.aliases[alias]} 使用")
            self.aliases[alias] = command.name

    def get_command(self, name: str) -> Optional[BaseCommand]:
        """获取指令"""
        # 直接查找指令名
        if name in self.commands:
            return self.commands[name]

        # 查找别名
        if name in self.aliases:
            return self.commands[self.aliases[name]]

        return None

    def get_all_commands(self) -> List[BaseCommand]:
        """获取所有指令"""
        return list(self.commands.values())


# 全局指令注册器实例
command_registry = CommandRegistry()
