import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_complex, random_contraction
from gammalab.errors import NotCommuting, NotContraction, NotNormal, NotPSD, ShapeError
from gammalab.kernel import (
    adjoint,
    defect_pair,
    hermitian_spectrum,
    joint_diagonalize,
    numerical_radius,
    operator_norm,
    psd_sqrt,
    range_basis,
    sot_limit_q,
    spectral_radius,
)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def complex_matrices(n):
    return st.tuples(arrays(float, (n, n), elements=finite), arrays(float, (n, n), elements=finite)).map(
        lambda p: p[0] + 1j * p[1]
    )


def test_operator_norm_examples():
    assert operator_norm(np.zeros((3, 3))) == 0
    assert operator_norm(np.eye(3)) == pytest.approx(1, abs=1e-15)
    assert operator_norm(np.diag([0.3, -0.9])) == pytest.approx(0.9, abs=1e-15)


def test_spectral_radius_examples():
    assert spectral_radius(np.array([[0, 1], [0, 0]])) == 0
    assert spectral_radius(np.diag(np.exp(1j * np.array([0.3, 2.0])))) == pytest.approx(1, abs=1e-14)
    assert spectral_radius(np.diag([0.2, 0.5 + 0.5j])) == pytest.approx(0.7071067812, abs=1e-10)
    with pytest.raises(ShapeError):
        spectral_radius(np.ones((2, 3)))


def test_numerical_radius_examples(rng):
    assert numerical_radius(np.array([[0, 1], [0, 0]])) == pytest.approx(0.5, abs=1e-8)
    assert numerical_radius(np.zeros((3, 3))) == 0
    H = random_complex(rng, 4)
    H = H + adjoint(H)
    assert numerical_radius(H) == pytest.approx(spectral_radius(H), abs=1e-8)


def test_numerical_radius_dense_oracle(rng):
    # independent oracle: brute-force field of values on a fine angle grid
    A = random_complex(rng, 4)
    th = np.linspace(0, 2 * np.pi, 20001)
    vals = [np.linalg.eigvalsh((np.exp(1j * t) * A + np.exp(-1j * t) * adjoint(A)) / 2)[-1] for t in th]
    assert numerical_radius(A) == pytest.approx(max(vals), abs=1e-6)


@given(complex_matrices(3))
def test_numerical_radius_sandwich(A):
    w = numerical_radius(A)
    tol = 1e-6 * max(1, operator_norm(A))
    assert spectral_radius(A) <= w + tol
    assert w <= operator_norm(A) + tol
    assert operator_norm(A) <= 2 * w + 2 * tol


def test_hermitian_spectrum_reconstruction(rng):
    H = random_complex(rng, 5)
    H = H + adjoint(H)
    hs = hermitian_spectrum(H)
    V = hs.eigenvectors
    assert np.all(np.diff(hs.eigenvalues) >= 0)
    assert operator_norm(adjoint(V) @ V - np.eye(5)) <= 1e-12
    assert operator_norm(hs.reconstruct() - H) <= 1e-10 * max(1, operator_norm(H))


def test_psd_sqrt_examples():
    assert np.allclose(psd_sqrt(np.eye(3)), np.eye(3))
    assert np.allclose(psd_sqrt(np.diag([0.64, 0.25])), np.diag([0.8, 0.5]), atol=1e-15)
    assert np.allclose(psd_sqrt(np.diag([-1e-14, 1]), clip_tol=1e-12), np.diag([0, 1]))
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([-1e-3, 1.0]), clip_tol=1e-12)


def test_defect_pair_examples(rng):
    U = np.linalg.qr(random_complex(rng, 3))[0]
    D, b = defect_pair(U)
    assert b.rank == 0 and operator_norm(D) == 0
    D, b = defect_pair(np.zeros((3, 3)))
    assert b.rank == 3 and np.allclose(D, np.eye(3))
    D, b = defect_pair(np.array([[0.6]]))
    assert b.rank == 1 and D[0, 0] == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(NotContraction):
        defect_pair(2 * np.eye(2))


def test_diagonal_input_gives_coordinate_frame():
    _, b = defect_pair(np.diag([1.0, 0.5, 0.0]))
    assert b.rank == 2
    assert np.allclose(np.abs(b.frame), np.array([[0, 0], [1, 0], [0, 1]]))


@given(st.integers(0, 10_000), st.integers(1, 5))
def test_defect_intertwining(seed, n):
    T = random_contraction(np.random.default_rng(seed), n, 0.999)
    D, b = defect_pair(T)
    Ds, _ = defect_pair(adjoint(T))
    assert operator_norm(T @ D - Ds @ T) <= 1e-10
    assert operator_norm(adjoint(b.frame) @ b.frame - np.eye(b.rank)) <= 1e-12


def test_sot_limit_examples(rng):
    U = np.linalg.qr(random_complex(rng, 3))[0]
    assert np.allclose(sot_limit_q(U), np.eye(3), atol=1e-12)
    assert operator_norm(sot_limit_q(random_contraction(rng, 3, 0.9))) <= 1e-12
    Q = sot_limit_q(np.diag([1.0, 0.5]))
    assert np.array_equal(Q, np.diag([1.0, 0.0]).astype(complex))


@given(st.integers(0, 10_000))
def test_sot_limit_history_monotone(seed):
    rng = np.random.default_rng(seed)
    n = 4
    U = np.diag(np.exp(2j * np.pi * rng.random(2)))
    T = np.zeros((n, n), dtype=complex)
    T[:2, :2] = U
    T[2:, 2:] = random_contraction(rng, 2, 0.97)
    W = np.linalg.qr(random_complex(rng, n))[0]
    _, hist = sot_limit_q(W @ T @ adjoint(W), return_history=True)
    for a, b in zip(hist, hist[1:]):
        assert np.linalg.eigvalsh(b - a)[-1] <= 1e-12



def test_sot_limit_survives_rounding_on_unitary_part():
    # conjugated unitary (+) stable block: rounding pushes the unimodular
    # eigenvalues just past 1 and unchecked squaring would overflow
    rng = np.random.default_rng(61)
    U = np.diag(np.exp(2j * np.pi * rng.random(2)))
    T = np.zeros((4, 4), dtype=complex)
    T[:2, :2] = U
    T[2:, 2:] = random_contraction(rng, 2, 0.97)
    W = np.linalg.qr(random_complex(rng, 4))[0]
    Q = sot_limit_q(W @ T @ adjoint(W))
    E = W @ np.diag([1.0, 1.0, 0.0, 0.0]) @ adjoint(W)
    assert np.abs(Q - E).max() <= 1e-10

def test_range_basis_rank():
    b, w = range_basis(np.diag([1.0, 1e-9, 0.3]))
    assert b.rank == 2
    assert np.allclose(sorted(w), [0.3, 1.0])


def test_joint_diagonalize_examples(rng):
    U, spec = joint_diagonalize([np.diag([3.0, 1.0, 2.0])])
    assert sorted(spec[0].real) == [1, 2, 3]
    _, spec = joint_diagonalize([np.diag([1.0, 2.0]), np.diag([3.0, 4.0])])
    assert {tuple(np.round(c.real, 12)) for c in spec.T} == {(1, 3), (2, 4)}


def test_joint_diagonalize_conjugated_with_degeneracy(rng):
    W = np.linalg.qr(random_complex(rng, 5))[0]
    d = np.array([1, 1, 1j, 1j, -1], dtype=complex)
    e = np.array([0.5, -0.5, 2, 2, 0], dtype=complex)
    A, B = W @ np.diag(d) @ adjoint(W), W @ np.diag(e) @ adjoint(W)
    U, spec = joint_diagonalize([A, B])
    for M, row in zip((A, B), spec):
        assert operator_norm(U @ np.diag(row) @ adjoint(U) - M) <= 1e-8
    got = sorted(zip(np.round(spec[0], 8), np.round(spec[1], 8)), key=lambda p: (p[0].real, p[0].imag, p[1].real))
    want = sorted(zip(d, e), key=lambda p: (p[0].real, p[0].imag, p[1].real))
    assert np.allclose(np.array(got), np.array(want), atol=1e-8)


def test_joint_diagonalize_rejects():
    with pytest.raises(NotNormal):
        joint_diagonalize([np.array([[0, 1], [0, 0]])])
    with pytest.raises(NotCommuting):
        joint_diagonalize([np.diag([1.0, 2.0]), np.array([[0, 1], [1, 0]])])
