import logging
import logging.handlers
import os
import re
import sys
from pathlib import Path

# ANSI 颜色代码
class ANSIColors:
    """ANSI 颜色代码"""
    RESET = '\033[0m'
    BOLD = '\033[1m'
    DIM = '\033[2m'
    UNDERLINE = '\033[4m'

    # 前景色
    RED = '\033[31m'
    GREEN = '\033[32m'
    YELLOW = '\033[33m'
    BLUE = '\033[34m'
    MAGENTA = '\033[35m'
    CYAN = '\033[36m'

    # 明亮的前景色
    BRIGHT_RED = '\033[91m'
    BRIGHT_GREEN = '\033[92m'
    BRIGHT_YELLOW = '\033[93m'
    BRIGHT_BLUE = '\033[94m'
    BRIGHT_MAGENTA = '\033[95m'


class ColoredFormatter(logging.Formatter):
    """带颜色的日志格式化器"""

    # 日志级别对应的颜色
    LOG_COLORS = {
        logging.DEBUG: ANSIColors.DIM + ANSIColors.CYAN,
        logging.INFO: ANSIColors.GREEN,
        logging.WARNING: ANSIColors.YELLOW + ANSIColors.BOLD,
        logging.ERROR: ANSIColors.RED + ANSIColors.BOLD,
        logging.CRITICAL: ANSIColors.BRIGHT_RED + ANSIColors.BOLD + ANSIColors.UNDERLINE,
    }

    # 组件名称的颜色
    COMPONENT_COLORS = {
        'Construct': ANSIColors.BRIGHT_MAGENTA,
        'Verify': ANSIColors.BRIGHT_YELLOW,
        'IO': ANSIColors.CYAN,
        'Dilato': ANSIColors.BOLD + ANSIColors.BRIGHT_BLUE,
    }

    # 高亮关键词
    HIGHLIGHT_PATTERNS = {
        '通过': ANSIColors.GREEN + ANSIColors.BOLD,
        '✅': ANSIColors.GREEN + ANSIColors.BOLD,
        '完成': ANSIColors.GREEN + ANSIColors.BOLD,

        '失败': ANSIColors.RED + ANSIColors.BOLD,
        '❌': ANSIColors.RED + ANSIColors.BOLD,
        '错误': ANSIColors.RED + ANSIColors.BOLD,
        '异常': ANSIColors.RED,

        '跳过': ANSIColors.YELLOW + ANSIColors.BOLD,
        '⚠': ANSIColors.YELLOW + ANSIColors.BOLD,
        '加倍': ANSIColors.YELLOW,

        'ℹ': ANSIColors.CYAN,
    }

    def __init__(self, fmt=None, datefmt=None, style='%'):
        super().__init__(fmt, datefmt, style)
        self.use_colors = self._supports_color()
        # 残差数值, 如 1.23e-11
        self.residual_pattern = re.compile(r'(\b\d\.\d+e[-+]\d+\b)')

    def _highlight_residuals(self, text):
        if not self.use_colors:
            return text
        return self.residual_pattern.sub(lambda m: ANSIColors.BLUE + m.group(1) + ANSIColors.RESET, text)

    def _supports_color(self):
        """检测终端是否支持颜色"""
        if os.environ.get('NO_COLOR'):
            return False

        # Windows 检查
        if sys.platform == 'win32':
            try:
                import ctypes
                kernel32 = ctypes.windll.kernel32
                kernel32.SetConsoleMode(kernel32.GetStdHandle(-11), 7)
                return True
            except Exception:
                return 'TERM' in os.environ or 'ANSICON' in os.environ

        # 日志写到 stderr
        return hasattr(sys.stderr, 'isatty') and sys.stderr.isatty()

    def format(self, record):
        # 如果不支持颜色，使用原始格式化
        if not self.use_colors:
            return super().format(record)

        formatted = super().format(record)

        # 添加级别颜色
        level_color = self.LOG_COLORS.get(record.levelno, '')
        if level_color:
            formatted = formatted.replace(record.levelname, level_color + record.levelname + ANSIColors.RESET, 1)

        # 添加组件名称颜色
        for comp, color in self.COMPONENT_COLORS.items():
            if comp in record.name:
                formatted = formatted.replace(comp, color + comp + ANSIColors.RESET, 1)
                break

        # 高亮关键词
        for pattern, color in self.HIGHLIGHT_PATTERNS.items():
            if pattern in formatted:
                formatted = formatted.replace(pattern, color + pattern + ANSIColors.RESET)

        return self._highlight_residuals(formatted)


class DilatoLogger:

    def __init__(self, global_config=None):
        # 1. 设置和解析配置
        self._setup_config(global_config)

        # 2. 创建根日志目录
        self.log_dir = Path(self.config.get("dir", "logs"))
        if self.to_file:
            self.log_dir.mkdir(parents=True, exist_ok=True)

        # 3. 配置主日志记录器 ("Dilato")
        self._setup_main_logger()

        # 4. 配置各组件的子日志记录器, 库代码通过 logging.getLogger("Dilato.<组件>") 写入
        self.construct = self._setup_special_logger("Construct", "construct")
        self.verify = self._setup_special_logger("Verify", "verify")
        self.io = self._setup_special_logger("IO", "io", use_timed_rotation=False)

    def __getattr__(self, name):
        if name == "main_logger":
            raise AttributeError(name)
        if hasattr(self.main_logger, name):
            return getattr(self.main_logger, name)
        raise AttributeError(f"'{self.__class__.__name__}' object has no attribute '{name}'")

    def _setup_config(self, global_config):
        self.config = {
            "level": "INFO",
            "file_rotation": True,
            "keep_days": 7,
            "max_file_size": "10MB",
            "to_file": True,
        }
        if global_config and "logging" in global_config:
            self.config.update(global_config["logging"])

        self.log_level = getattr(logging, str(self.config["level"]).upper())
        self.keep_days = int(self.config["keep_days"])
        self.to_file = bool(self.config["to_file"])

    def _file_handler(self, path: Path, use_timed_rotation: bool) -> logging.Handler:
        if use_timed_rotation:
            # 按时间轮转 (每日)
            return logging.handlers.TimedRotatingFileHandler(
                filename=path,
                when="midnight",
                interval=1,
                backupCount=self.keep_days,
                encoding="utf-8"
            )
        # 按大小轮转
        return logging.handlers.RotatingFileHandler(
            filename=path,
            maxBytes=self._parse_size(self.config["max_file_size"]),
            backupCount=self.keep_days, # 使用 keep_days 作为备份数量
            encoding="utf-8"
        )

    def _setup_main_logger(self):
        self.main_logger = logging.getLogger("Dilato")
        self.main_logger.setLevel(self.log_level)
        self.main_logger.handlers.clear()
        self.main_logger.propagate = False

        # 控制台处理器 - 使用带颜色的格式化器
        self.console_handler = logging.StreamHandler()
        console_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        self.console_handler.setFormatter(ColoredFormatter(console_format))
        self.main_logger.addHandler(self.console_handler)

        if not self.to_file:
            return

        file_formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s')
        handler = self._file_handler(self.log_dir / "dilato.log", bool(self.config["file_rotation"]))
        handler.setFormatter(file_formatter)
        self.main_logger.addHandler(handler)

    def _setup_special_logger(self, name, sub_dir, use_timed_rotation=True):
        """
        创建一个组件子日志记录器。

        :param name: 日志记录器名称 (e.g., "Construct")
        :param sub_dir: 日志存放的子目录 (e.g., "construct")
        :param use_timed_rotation: 按时间还是按大小轮转; file_rotation 关闭时一律按大小
        :return: 配置好的 logging.Logger 实例。
        """
        logger = logging.getLogger(f"Dilato.{name}")
        logger.setLevel(self.log_level)
        logger.handlers.clear()
        logger.propagate = False  # 防止日志向上传播到主日志记录器

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(ColoredFormatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        logger.addHandler(console_handler)

        if self.to_file:
            special_log_dir = self.log_dir / sub_dir
            special_log_dir.mkdir(parents=True, exist_ok=True)
            timed = use_timed_rotation and bool(self.config["file_rotation"])
            handler = self._file_handler(special_log_dir / f"{sub_dir}.log", timed)
            handler.setFormatter(logging.Formatter('%(asctime)s - %(levelname)s - %(message)s'))
            logger.addHandler(handler)
        return logger

    def log_residual(self, name, value, tol, instance="", level="info"):
        """
        记录一条残差检查结果, 形如 "✅ seed=3 x_unitarity = 1.2e-15 (容差 1e-09)"。
        底层调用 self.verify。
        """
        passed = value <= tol
        mark = "✅" if passed else "❌"
        prefix = f"{instance} " if instance else ""
        line = f"{mark} {prefix}{name} = {value:.3e} (容差 {tol:.0e})"

        if not passed:
            self.verify.warning(line)
        elif level == "info":
            self.verify.info(line)
        elif level == "debug":
            self.verify.debug(line)
        else:
            raise ValueError(f"Invalid log level: {level}")
        return passed

    @staticmethod
    def _parse_size(size_str):
        """解析大小字符串，如 '10MB' -> 10485760"""
        size_str = str(size_str).upper()
        if size_str.endswith('KB'):
            return int(size_str[:-2]) * 1024
        elif size_str.endswith('MB'):
            return int(size_str[:-2]) * 1024 * 1024
        elif size_str.endswith('GB'):
            return int(size_str[:-2]) * 1024 * 1024 * 1024
        else:
            return int(size_str)
