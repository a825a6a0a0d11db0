"""
文件格式模块
实例文件 (pair-v1), 报告与绘图数据
"""
