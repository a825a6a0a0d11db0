"""
算子模块
稠密复矩阵上的线性代数, 交换压缩对, Andô 元组与截断 Hardy 空间
"""
