#!/usr/bin/env python3
"""
dilato
交换压缩对的 Andô 膨胀构造与验证工具

主程序入口文件
"""

import sys
from pathlib import Path

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).parent))

from app.__main__ import _cli_entrypoint

if __name__ == "__main__":
    _cli_entrypoint()
