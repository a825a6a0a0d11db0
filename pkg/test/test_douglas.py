"""
Douglas 模型膨胀
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.dilation.douglas import (
    build_douglas_data,
    build_douglas_pair,
    choose_degree,
    douglas_residuals,
    observability,
    verify_lemma_tet_fund,
)
from app.operators.errors import TailNotConverged
from app.operators.linalg import adjoint, op_norm, random_unitary
from app.operators.pairs import validate_pair

ASSERTED_KEYS = (
    "x_unitarity",
    "x_factorization",
    "x_relation",
    "row_recursion_1",
    "row_recursion_2",
    "intertwine_v1",
    "intertwine_v2",
    "product_compression",
    "boundary_unitarity",
)


def test_nilpotent_pair_has_empty_r(nilpotent_pair):
    data = build_douglas_data(nilpotent_pair)
    assert data.r_dim == 0
    assert data.x1.shape == (0, 0)


def test_equal_unitaries():
    u = random_unitary(3, np.random.default_rng(2))
    pair = validate_pair(u, u)
    data = build_douglas_data(pair)
    basis = data.asym.q_basis.basis
    assert data.r_dim == 3
    assert_allclose(basis @ data.x1 @ adjoint(basis), u, atol=1e-10)
    assert_allclose(basis @ data.x @ adjoint(basis), u @ u, atol=1e-10)


def test_scalar_fundamental_operators(scalar_pair):
    data = build_douglas_data(scalar_pair)
    assert data.r_dim == 0
    assert_allclose(data.g1, [[0.4]], atol=1e-12)
    assert_allclose(data.g2, [[0.4]], atol=1e-12)


def test_observability_of_zero():
    obs = observability(np.zeros((2, 2), dtype=np.complex128), None, 4)
    assert obs.shape == (8, 2)
    assert op_norm(obs[2:]) == 0.0


def test_observability_geometric_rows():
    obs = observability(np.array([[0.25]]), None, 4)
    assert_allclose(obs[:, 0], np.sqrt(15) / 4 * 0.25 ** np.arange(4), atol=1e-12)
    assert float(np.sum(np.abs(obs) ** 2)) == pytest.approx(1 - 0.0625**4, abs=1e-14)


def test_choose_degree():
    t = np.array([[0.25]], dtype=np.complex128)
    n, tail = choose_degree(t, np.zeros((1, 1)), start=16)
    assert n == 16
    assert tail <= 1e-10


def test_choose_degree_gives_up():
    t = np.array([[0.999]], dtype=np.complex128)
    with pytest.raises(TailNotConverged) as info:
        choose_degree(t, np.zeros((1, 1)), start=8, max_degree=32)
    assert info.value.exit_code == 1


def test_commuting_unitaries_have_no_hardy_part(unitary_pair):
    data = build_douglas_data(unitary_pair)
    dil = build_douglas_pair(unitary_pair, data)
    assert dil.f_star == 0
    assert dil.space_dim == 3
    res = douglas_residuals(unitary_pair, data, dil)
    assert max(res[key] for key in ASSERTED_KEYS) <= 1e-9


@pytest.mark.parametrize("name", ["scalar_pair", "nilpotent_pair", "poly_pair", "diag_pair"])
def test_residuals_vanish(name, request):
    pair = request.getfixturevalue(name)
    data = build_douglas_data(pair)
    dil = build_douglas_pair(pair, data)
    res = douglas_residuals(pair, data, dil)
    for key in ASSERTED_KEYS:
        assert res[key] <= 1e-9, (key, res[key])
    assert res["pi_d_isometry_deficit_max"] <= 1e-12
    assert res["pi_tilde_rank_gap"] == 0
    for key in ("isometry_v1", "isometry_v2", "commutation"):
        assert res[key] <= 1e-8, (key, res[key])


def test_row_recursion_detects_perturbation(scalar_pair):
    data = build_douglas_data(scalar_pair)
    res1, _ = verify_lemma_tet_fund(scalar_pair, data, h1=data.h1 + 0.1 * np.eye(data.f_star))
    assert res1 > 1e-3


def test_fixed_degree_records_tail(scalar_pair):
    data = build_douglas_data(scalar_pair)
    dil = build_douglas_pair(scalar_pair, data, n=4, adaptive=False)
    assert dil.n == 4
    assert dil.tail == pytest.approx(0.0625**4, rel=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_isometry_factors_on_mixed_pair(seed):
    rng = np.random.default_rng(seed)
    omega = random_unitary(3, rng)
    alpha, beta = rng.uniform(0, 2 * np.pi, size=2)
    t1 = omega @ np.diag([0.5, -0.3, np.exp(1j * alpha)]) @ adjoint(omega)
    t2 = omega @ np.diag([0.4, 0.6j, np.exp(1j * beta)]) @ adjoint(omega)
    pair = validate_pair(t1, t2)
    data = build_douglas_data(pair)
    assert data.r_dim == 1

    basis = data.asym.q_basis.basis
    q = data.asym.q
    for x, t in ((data.x1, pair.t1), (data.x2, pair.t2), (data.x, pair.t)):
        full = basis @ x @ adjoint(basis)
        assert op_norm(adjoint(full) @ q - q @ adjoint(t)) <= 1e-9
        assert op_norm(adjoint(x) @ x - np.eye(1)) <= 1e-9
    assert op_norm(adjoint(data.x1) @ adjoint(data.x2) - adjoint(data.x)) <= 1e-9
    assert data.x1[0, 0] == pytest.approx(np.exp(1j * alpha), abs=1e-9)
    assert data.x[0, 0] == pytest.approx(np.exp(1j * (alpha + beta)), abs=1e-9)

    dil = build_douglas_pair(pair, data)
    assert dil.r_dim == 1
    res = douglas_residuals(pair, data, dil)
    for key in ASSERTED_KEYS:
        assert res[key] <= 1e-9, (key, res[key])
    assert res["pi_tilde_rank_gap"] == 0


def test_range_of_pi_tilde_has_dimension_of_h(poly_pair):
    data = build_douglas_data(poly_pair)
    dil = build_douglas_pair(poly_pair, data)
    m = dil.range_of_pi_tilde()
    assert m.dim == poly_pair.dim
    assert m.ambient_dim == dil.space_dim
