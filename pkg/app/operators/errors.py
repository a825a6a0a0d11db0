"""
异常定义
算子构造与验证过程中的全部错误类型

exit_code 约定: 0 = 跳过(附原因), 1 = 断言失败, 2 = 输入错误
"""

from typing import Optional


class DilatoError(Exception):
    """基础异常"""

    exit_code = 2

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual

    def __str__(self) -> str:
        text = super().__str__()
        if self.residual is not None:
            text += f" (残差 {self.residual:.3e})"
        return text


# 输入错误

class ShapeMismatch(DilatoError):
    """矩阵形状不匹配"""


class NonFiniteMatrix(DilatoError):
    """矩阵含有 NaN/Inf"""


class NotCommuting(DilatoError):
    """矩阵对不交换"""


class NotContraction(DilatoError):
    """算子范数超过 1"""


class NotHermitian(DilatoError):
    """矩阵不是 Hermite 的"""


class NegativeEigenvalue(DilatoError):
    """半正定性被破坏"""


class DimensionMismatch(DilatoError):
    """子空间维数不一致"""


class NotIsometric(DilatoError):
    """给定映射不是等距"""


class NonUnitaryInput(DilatoError):
    """给定的酉矩阵不是酉的"""


class IdentityViolation(DilatoError):
    """BCL 系数不满足四个恒等式"""


class InvalidConfig(DilatoError):
    """运行配置无效"""


class InstanceFormatError(DilatoError):
    """实例文件格式错误"""


class OutsideDisk(DilatoError):
    """求值点不在单位圆盘内"""


# 断言失败

class NoConvergence(DilatoError):
    """幂迭代未收敛"""

    exit_code = 1


class NonUnitaryX(DilatoError):
    """Ran Q 上求得的 X 不是酉的"""

    exit_code = 1


class TailNotConverged(DilatoError):
    """截断次数达到上限仍未满足尾部条件"""

    exit_code = 1


class SingularResolvent(DilatoError):
    """I - zT* 奇异"""

    exit_code = 1


class GramMismatch(DilatoError):
    """两个模型的 Gram 矩阵不一致"""

    exit_code = 1


# 跳过

class NotPure(DilatoError):
    """T 不是纯压缩, 仅适用于纯情形的检查将被跳过"""

    exit_code = 0
