"""
验证模块
检查套件与批量运行
"""
