"""
工具模块
"""

from .logger import DilatoLogger

__all__ = [
    "DilatoLogger",
]
