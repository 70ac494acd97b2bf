import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_complex, random_contraction
from gammalab.errors import NotPure
from gammalab.generators import diag_symbol_family5, diag_symbol_family7
from gammalab.hardy import (
    TruncatedHardySpace,
    build_W,
    compress_pure_model,
    compress_pure_model5,
    delta_sample,
    intertwine_residual5,
    intertwine_residual7,
    nagy_foias_column_residual,
    pencil_model7,
    pencil_operator,
    theta_series,
    theta_toeplitz,
    truncated_shift,
    w_property_residual,
)
from gammalab.kernel import adjoint, operator_norm


def jordan(lam, m):
    return lam * np.eye(m) + np.diag(np.ones(m - 1), 1)


def test_space_and_shift():
    sp = TruncatedHardySpace(3, 2)
    assert sp.dim == 6
    assert np.array_equal(truncated_shift(1, 2), np.zeros((2, 2)))
    assert np.array_equal(truncated_shift(2, 1), np.array([[0, 0], [1, 0]]))
    S = truncated_shift(4, 2)
    P = np.eye(8)
    P[6:, 6:] = 0
    assert np.allclose(adjoint(S) @ S, P)


def test_pencil_operator_examples():
    C0 = np.array([[0.2, 0.1], [0.0, -0.3]])
    assert np.allclose(pencil_operator(C0, np.zeros((2, 2)), 3), np.kron(np.eye(3), C0))
    P = pencil_operator([[0.5]], [[0.5]], 3)
    assert np.allclose(P, [[0.5, 0, 0], [0.5, 0.5, 0], [0, 0.5, 0.5]])


def test_pencils_commute_with_shift_away_from_top():
    F = diag_symbol_family7(2, 2)
    t = pencil_model7(F, 5)
    S = truncated_shift(5, 2)
    for X in t.mats:
        R = X @ S - S @ X
        assert operator_norm(R[:, :8]) <= 1e-12
    assert t.commutation_residual <= 1e-13


def test_theta_examples():
    th = theta_series(np.zeros((1, 1)), 4)
    assert np.allclose([c[0, 0] for c in th.coefficients], [0, 1, 0, 0, 0])
    th = theta_series(np.array([[0.5]]), 6)
    c = np.array([x[0, 0] for x in th.coefficients])
    assert c[0] == pytest.approx(-0.5)
    assert np.allclose(np.abs(c[1:]), 0.75 * 0.5 ** np.arange(6), atol=1e-15)
    U = np.linalg.qr(random_complex(np.random.default_rng(1), 2))[0]
    th = theta_series(U, 3)
    assert th.coefficients[0].shape == (0, 0)


def test_literal_convention_breaks_at_zero():
    th = theta_series(np.zeros((1, 1)), 4, convention="literal")
    assert th.coefficients[0][0, 0] == pytest.approx(1)
    assert w_property_residual(np.zeros((1, 1)), 8, convention="literal") == pytest.approx(1, abs=1e-12)
    assert w_property_residual(np.zeros((1, 1)), 8) == 0


def test_theta_toeplitz_is_lower_triangular():
    th = theta_series(np.array([[0.5]]), 5)
    M = theta_toeplitz(th, 4).matrix()
    assert np.allclose(np.triu(M, 1), 0)
    assert np.allclose(np.diag(M), -0.5)


def test_delta_vanishes_for_pure():
    assert operator_norm(delta_sample(np.zeros((1, 1)), np.exp(0.3j))) <= 1e-12
    assert operator_norm(delta_sample(np.array([[0.5]]), np.exp(1.1j))) <= 1e-8
    T = np.diag([0.5, 0.5, 1.0])
    assert operator_norm(delta_sample(T, -1.0)) <= 1e-8
    assert nagy_foias_column_residual(np.array([[0.5]]), 1j) <= 1e-12


def test_build_W_examples():
    W = build_W(np.zeros((2, 2)), 4)
    assert np.allclose(adjoint(W) @ W, np.eye(2))
    assert np.allclose(W[2:], 0)
    U = np.linalg.qr(random_complex(np.random.default_rng(0), 2))[0]
    assert build_W(U, 4).size == 0
    W = build_W(np.array([[0.5]]), 8)
    assert abs((adjoint(W) @ W)[0, 0] - 1) == pytest.approx(0.5 ** 16, rel=1e-10)


@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(1, 10))
def test_W_finite_identity(seed, n, N):
    T = random_contraction(np.random.default_rng(seed), n, 0.99)
    W = build_W(T, N)
    TN = np.linalg.matrix_power(T, N)
    assert operator_norm(adjoint(W) @ W - (np.eye(n) - TN @ adjoint(TN))) <= 1e-13


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_w_property_jordan(m):
    assert w_property_residual(jordan(0.0, m), m + 1) <= 1e-12
    T = jordan(0.5, m) / np.linalg.norm(jordan(0.5, m), 2) * 0.999
    assert w_property_residual(T, 32) <= max(1e-8, 2 * operator_norm(np.linalg.matrix_power(T, 32)))


def test_intertwining_diagonal_family():
    T7 = np.diag([0.3, -0.4j])
    Ft = diag_symbol_family7(7, 2)
    F = [adjoint(x) for x in Ft]
    th = theta_series(T7, 10)
    assert intertwine_residual7(Ft, F, th, 8).max() <= 1e-12
    bad = list(Ft)
    bad[0] = bad[0] + 0.1 * np.eye(2)
    assert intertwine_residual7(bad, F, th, 8)[0, 0] >= 0.1 * 0.3 - 1e-12
    Gh = diag_symbol_family5(7, 2)
    assert intertwine_residual5(Gh, [adjoint(x) for x in Gh], th, 8).max() <= 1e-12


def test_compress_pure_model_examples():
    Ft = [np.array([[v]]) for v in (0.1, 0.2j, -0.3, 0.2, 0.0, 0.4)]
    m = compress_pure_model(Ft, np.zeros((1, 1)), 4)
    assert np.allclose([x[0, 0] for x in m.tuple.mats[:6]], [np.conj(x[0, 0]) for x in Ft], atol=1e-12)
    assert abs(m.tuple.mats[6][0, 0]) <= 1e-12
    m = compress_pure_model(Ft, np.array([[0.5]]), 32)
    lam = 0.5
    want = [np.conj(Ft[i][0, 0]) + Ft[5 - i][0, 0] * lam for i in range(6)]
    got = [x[0, 0] for x in m.tuple.mats[:6]]
    assert np.allclose(got, want, atol=1e-8)
    assert m.tuple.mats[6][0, 0] == pytest.approx(0.5, abs=1e-8)
    with pytest.raises(NotPure):
        compress_pure_model(Ft, np.eye(1), 8)
    Gh = [np.array([[v]]) for v in (0.1, 0.2, 0.3j, 0.4)]
    m5 = compress_pure_model5(Gh, np.array([[0.5]]), 32)
    assert m5.tuple.commutation_residual <= 1e-8
