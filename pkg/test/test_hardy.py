"""
截断 Hardy 空间算子
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from app.operators.ando import random_bcl_data
from app.operators.errors import InvalidConfig, ShapeMismatch
from app.operators.hardy import (
    HardyVec,
    OpKind,
    PencilSymbol,
    analytic_toeplitz,
    column_space_projector,
    constant_embedding,
    interior_projector,
    mult_op,
    shift,
    top_degree_rows,
)
from app.operators.linalg import adjoint, op_norm, pencil_sup_norm


def test_constant_symbol_is_block_identity():
    op = mult_op(PencilSymbol(np.eye(2), np.zeros((2, 2))), 4)
    assert op.kind is OpKind.PENCIL
    assert_allclose(op.matrix, np.eye(8), atol=0)


def test_shift_symbol_is_forward_shift():
    op = shift(3, 2)
    assert op.kind is OpKind.SHIFT
    vec = HardyVec(2, 3, np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], dtype=np.complex128))
    out = op.apply(vec)
    assert_allclose(out.coeffs, [[0.0, 0.0], [1.0, 2.0], [3.0, 4.0]], atol=0)


def test_shift_is_isometric_on_interior():
    op = shift(5, 2).matrix
    j = interior_projector(5, 2).matrix
    assert op_norm(j @ (adjoint(op) @ op - np.eye(10)) @ j) == 0.0
    # 最高次系数被丢弃
    assert op_norm(adjoint(op) @ op - np.eye(10)) == pytest.approx(1.0)


def test_toeplitz_identity_and_shift():
    eye = np.eye(2)
    zero = np.zeros((2, 2))
    assert_allclose(analytic_toeplitz([eye], 3).matrix, np.eye(6), atol=0)
    assert_allclose(analytic_toeplitz([zero, eye], 3).matrix, shift(3, 2).matrix, atol=0)


def test_toeplitz_rectangular_blocks():
    op = analytic_toeplitz([np.ones((3, 1)), np.ones((3, 1))], 4)
    assert op.fiber_in == 1 and op.fiber_out == 3
    assert op.matrix.shape == (12, 4)


def test_toeplitz_pencil_agrees_with_mult_op():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2))
    assert_allclose(analytic_toeplitz([a, b], 5).matrix, mult_op(PencilSymbol(a, b), 5).matrix, atol=1e-15)


def test_toeplitz_block_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        analytic_toeplitz([np.eye(2), np.eye(3)], 3)


def test_interior_projector():
    assert_allclose(interior_projector(2, 1).matrix, np.diag([1.0, 0.0]), atol=0)


def test_degree_too_small():
    with pytest.raises(InvalidConfig):
        interior_projector(1, 2)
    with pytest.raises(InvalidConfig):
        shift(1, 1)


def test_column_space_projector():
    assert_allclose(column_space_projector(np.zeros((4, 2)), 2).matrix, np.zeros((4, 4)), atol=0)
    assert_allclose(column_space_projector(np.eye(4), 2).matrix, np.eye(4), atol=1e-12)


def test_constant_embedding_and_top_rows():
    block = np.array([[1.0], [2.0]])
    emb = constant_embedding(block, 3)
    assert emb.shape == (6, 1)
    assert_allclose(emb[:2], block, atol=0)
    assert top_degree_rows(3, 2) == slice(4, 6)


def _random_symbol(rng, fiber):
    a = rng.standard_normal((fiber, fiber)) + 1j * rng.standard_normal((fiber, fiber))
    b = rng.standard_normal((fiber, fiber)) + 1j * rng.standard_normal((fiber, fiber))
    return PencilSymbol(a, b)


@settings(max_examples=30, deadline=None)
@given(fiber=st.integers(1, 3), n=st.integers(2, 6), seed=st.integers(0, 2**16))
def test_adjoint_is_compression_of_longer_truncation(fiber, n, seed):
    rng = np.random.default_rng(seed)
    sym = _random_symbol(rng, fiber)
    y = rng.standard_normal(n * fiber) + 1j * rng.standard_normal(n * fiber)
    padded = np.concatenate([y, np.zeros(2 * fiber)])
    longer = mult_op(sym, n + 2).adjoint().matrix @ padded
    got = mult_op(sym, n).adjoint().apply(HardyVec.from_flat(y, fiber))
    assert np.linalg.norm(got.flat() - longer[: n * fiber]) <= 1e-12 * max(1.0, np.linalg.norm(longer))

    # (M^H y)_k = a^H y_k + b^H y_{k+1}, y_N = 0
    blocks = y.reshape(n, fiber)
    expected = blocks @ np.conj(sym.a)
    expected[:-1] += blocks[1:] @ np.conj(sym.b)
    assert_allclose(got.coeffs, expected, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_bcl_product_is_shift(seed):
    p, u = random_bcl_data(3, seed)
    eye = np.eye(3)
    e1, e2 = (eye - p) @ u, adjoint(u) @ p
    n = 5
    v1 = mult_op(PencilSymbol(e1, adjoint(e2)), n).matrix
    v2 = mult_op(PencilSymbol(e2, adjoint(e1)), n).matrix
    j = interior_projector(n, 3).matrix
    s = shift(n, 3).matrix
    assert op_norm((v1 @ v2 - s) @ j) <= 1e-12
    assert op_norm((v2 @ v1 - s) @ j) <= 1e-12
    # 截断的下三角 Toeplitz 乘积就是乘积的截断
    assert op_norm(v1 @ v2 - s) <= 1e-12


def test_blaschke_toeplitz():
    n = 16
    coeffs = [np.array([[-0.25]])] + [np.array([[0.9375 * 0.25 ** (k - 1)]]) for k in range(1, n)]
    m = analytic_toeplitz(coeffs, n).matrix
    column = np.array([c[0, 0] for c in coeffs])
    assert_allclose(m[:, 0], column, atol=1e-15)
    for j in range(1, n):
        assert_allclose(m[j:, j], column[: n - j], atol=1e-15)
        assert_allclose(m[:j, j], np.zeros(j), atol=0)
    assert np.linalg.norm(m[:, 0]) == pytest.approx(1.0, abs=1e-12)
    assert op_norm(m) <= 1 + 1e-10

    # 与 (z - 0.25) / (1 - 0.25 z) 的 Taylor 展开一致
    z = 0.3 + 0.2j
    series = np.sum(column * z ** np.arange(n))
    assert series == pytest.approx((z - 0.25) / (1 - 0.25 * z), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(fiber=st.integers(1, 3), n=st.integers(2, 6), seed=st.integers(0, 2**16))
def test_mult_op_commutes_with_shift(fiber, n, seed):
    op = mult_op(_random_symbol(np.random.default_rng(seed), fiber), n).matrix
    s = shift(n, fiber).matrix
    j = interior_projector(n, fiber).matrix
    assert op_norm((op @ s - s @ op) @ j) <= 1e-12 * max(1.0, op_norm(op))
    assert op_norm(op @ s - s @ op) <= 1e-12 * max(1.0, op_norm(op))


@settings(max_examples=30, deadline=None)
@given(
    fiber=st.integers(1, 3),
    n=st.integers(2, 6),
    seed=st.integers(0, 2**16),
    weight=st.floats(0.0, 1.0),
)
def test_contractive_symbol_gives_contraction(fiber, n, seed, weight):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((fiber, fiber)) + 1j * rng.standard_normal((fiber, fiber))
    b = rng.standard_normal((fiber, fiber)) + 1j * rng.standard_normal((fiber, fiber))
    # ||a|| + ||b|| = 1 保证 sup ||a + zb|| <= 1
    a = weight * a / op_norm(a)
    b = (1.0 - weight) * b / op_norm(b)
    assert pencil_sup_norm(a, b) <= 1 + 1e-12
    assert op_norm(mult_op(PencilSymbol(a, b), n).matrix) <= 1 + 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_bcl_symbols_have_unit_sup(seed):
    p, u = random_bcl_data(2, seed)
    eye = np.eye(2)
    e1, e2 = (eye - p) @ u, adjoint(u) @ p
    a, b = e1, adjoint(e2)
    assert pencil_sup_norm(a, b) <= 1 + 1e-10
    assert op_norm(mult_op(PencilSymbol(a, b), 6).matrix) <= 1 + 1e-10
