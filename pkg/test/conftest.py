"""
测试公共夹具
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到Python路径
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.config.config_validator import RunConfig
from app.operators.pairs import GenerationScheme, random_pair, random_unitary_pair, validate_pair

J = np.array([[0.0, 1.0], [0.0, 0.0]])


@pytest.fixture
def scalar_pair():
    """T1 = T2 = 0.5"""
    return validate_pair([[0.5]], [[0.5]])


@pytest.fixture
def zero_pair():
    return validate_pair([[0.0]], [[0.0]])


@pytest.fixture
def nilpotent_pair():
    """(J, J), T = J^2 = 0"""
    return validate_pair(J, J)


@pytest.fixture
def unitary_pair():
    return random_unitary_pair(3, seed=11)


@pytest.fixture
def poly_pair():
    return random_pair(3, 7, GenerationScheme.POLY_IN_ONE_MATRIX, max_spectral_radius=0.9)


@pytest.fixture
def diag_pair():
    return random_pair(3, 5, GenerationScheme.DIAGONAL_PLUS_ROTATION)


@pytest.fixture
def run_config():
    return RunConfig(command="verify", workers=2)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """在临时目录中运行, 不读取仓库内的配置文件, 不受环境变量影响"""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("DILATO_DEFAULT_N", raising=False)
    return tmp_path
