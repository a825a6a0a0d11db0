"""
dilato 应用核心模块
"""

__version__ = "0.1.0"
__description__ = "交换压缩对的 Andô 膨胀: 构造, 唯一性与特征函数模型的数值验证"
