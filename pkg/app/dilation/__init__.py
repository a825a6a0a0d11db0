"""
膨胀模块
Schäffer 模型与 Douglas 模型
"""
