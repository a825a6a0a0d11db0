"""
模型模块
特征函数, 纯情形的函数模型与极小膨胀的唯一性
"""
