import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from gammalab.dilation import (
    admissible_construct5,
    admissible_construct7,
    canonical_unitary5,
    canonical_unitary7,
    circulant_gamma_unitary,
    corner_recovery5,
    corner_recovery7,
    dilation_identity_check,
    douglas_embedding,
    gamma_isometry_check5,
    gamma_isometry_check7,
    gamma_unitary_check7,
    schaffer5,
    schaffer7,
    unitary_equivalence_invariance,
    wold_verify,
)
from gammalab.errors import NormViolation, NotPure, ResidualTooLarge, TruncationError
from gammalab.fundamental import Gamma7Tuple, solve_fundamental5, solve_fundamental7
from gammalab.generators import (
    circulant_unitary,
    compressed_contraction5,
    compressed_contraction7,
    diag_symbol_family5,
    diag_symbol_family7,
    mixed_tuple5,
    mixed_tuple7,
    random_unitary,
)
from gammalab.hardy import build_W, pencil_model5, pencil_model7
from gammalab.kernel import adjoint, operator_norm


def scalar7(vals):
    return Gamma7Tuple([np.array([[v]], dtype=complex) for v in vals])


# Schaffer ---------------------------------------------------------------


def test_scalar_schaffer_powers():
    t = scalar7([0.1, 0.2, 0.05, 0.1, 0.02, 0.1, 0.5])
    N = 10
    d = schaffer7(t, solve_fundamental7(t), N)
    assert d.V[6].shape == (1 + N, 1 + N)
    P = np.eye(1 + N)
    for k in range(N + 1):
        assert (adjoint(d.pi) @ P @ d.pi)[0, 0] == 0.5 ** k
        P = P @ d.V[6]


def test_isometry_input_is_trivial():
    t = circulant_unitary(2, 1, 4)
    d = schaffer7(t, solve_fundamental7(t), 4)
    assert d.fiber_dim == 0
    assert all(np.array_equal(V, T) for V, T in zip(d.V, t.mats))


def test_bad_fundamental_rejected():
    t = compressed_contraction7(0, 2, 3)
    f = solve_fundamental7(t)
    f.residuals = f.residuals + 1.0
    with pytest.raises(ResidualTooLarge):
        schaffer7(t, f, 4)


def test_degree_limit():
    t = compressed_contraction7(0, 1, 3)
    d = schaffer7(t, solve_fundamental7(t), 6)
    assert dilation_identity_check(d, t, 0) == 0
    with pytest.raises(TruncationError):
        dilation_identity_check(d, t, 5)


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 5))
def test_schaffer7_exactness(seed, dim, k):
    t = compressed_contraction7(seed, dim, k)
    f = solve_fundamental7(t)
    d = schaffer7(t, f, 16)
    assert d.lift_residuals.max() <= 1e-13
    assert dilation_identity_check(d, t, 8, samples=16, seed=seed) <= 1e-10
    assert corner_recovery7(d, f) <= 1e-10
    assert d.interior_defect <= 1e-12


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 5))
def test_schaffer5_exactness(seed, dim, k):
    s = compressed_contraction5(seed, dim, k)
    g = solve_fundamental5(s)
    d = schaffer5(s, g, 16)
    assert d.lift_residuals.max() <= 1e-13
    assert dilation_identity_check(d, s, 8, samples=16, seed=seed) <= 1e-10
    assert corner_recovery5(d, g) <= 1e-10


def test_mixed_monomial():
    t = compressed_contraction7(4, 2, 4)
    d = schaffer7(t, solve_fundamental7(t), 8)
    T1, T7 = t.mats[0], t.mats[6]
    V1, V7 = d.V[0], d.V[6]
    assert operator_norm(adjoint(d.pi) @ V1 @ V7 @ V7 @ d.pi - T1 @ T7 @ T7) <= 1e-11


# isometry and unitary checks ----------------------------------------


def test_isometry_check_pencil_model_away_from_edge():
    F = diag_symbol_family7(1, 2)
    t = pencil_model7(F, 6)
    mask = np.ones(12, dtype=bool)
    mask[10:] = False
    assert gamma_isometry_check7(t, 1e-12, mask).passed
    assert not gamma_isometry_check7(t, 1e-12).passed
    G = diag_symbol_family5(1, 2)
    s = pencil_model5(*G, 6)
    assert gamma_isometry_check5(s, 1e-12, mask).passed


def test_isometry_check_generic_fails(rng):
    t = compressed_contraction7(0, 2, 3)
    assert not gamma_isometry_check7(t)["V7*V7=I"].passed


def test_unitary_check_joint_spectrum():
    t = circulant_unitary(3, 2, 4, form="circulant")
    rep = gamma_unitary_check7(t.mats, 1e-12)
    assert rep.passed
    assert rep.data["joint_spectrum"].shape == (7, 8)


# Douglas --------------------------------------------------------------


def test_douglas_unitary_tuple():
    t = circulant_unitary(3, 1, 4)
    e = douglas_embedding(t, 8)
    assert e.O.size == 0
    assert np.allclose(e.Q, np.eye(4)) and e.isometry_residual <= 1e-12
    assert e.report.passed


def test_douglas_pure_reduces_to_W():
    t = compressed_contraction7(3, 1, 3)
    T7 = t.mats[6] * 0.9
    t = Gamma7Tuple(t.mats[:6] + [T7])
    e = douglas_embedding(t, 8)
    assert np.allclose(e.O, build_W(T7, 8))
    assert operator_norm(e.Q) == 0
    assert e.isometry_residual == pytest.approx(operator_norm(np.linalg.matrix_power(T7, 8)) ** 2, abs=1e-15)


def test_douglas_mixed():
    t = mixed_tuple7(5, 2, 3, conjugate=True)
    e = douglas_embedding(t, 6)
    assert e.report.passed, e.report.format()


# canonical unitary ------------------------------------------------------


def test_canonical_of_unitary_is_itself():
    t = circulant_unitary(1, 1, 4)
    c = canonical_unitary7(t)
    assert c.rank == 4
    assert max(operator_norm(c.ambient(i) - t.mats[i]) for i in range(7)) <= 1e-12


def test_canonical_of_stable_is_empty():
    c = canonical_unitary7(compressed_contraction7(0, 2, 3))
    assert c.rank == 0 and c.report.passed


@given(st.integers(0, 10_000), st.integers(1, 4), st.integers(1, 4))
def test_canonical_mixed_rank(seed, u, k):
    t = mixed_tuple7(seed, u, k, conjugate=True)
    c = canonical_unitary7(t)
    assert c.rank == u
    assert c.report.passed, c.report.format()
    s = mixed_tuple5(seed, u, k, conjugate=True)
    c5 = canonical_unitary5(s)
    assert c5.rank == u and c5.report.passed


def test_invariance_and_control():
    t = mixed_tuple7(1, 3, 2)
    ok, dist = unitary_equivalence_invariance(t, random_unitary(4, t.n))
    assert ok and dist <= 1e-8
    other = mixed_tuple7(2, 3, 2)
    a, b = canonical_unitary7(t), canonical_unitary7(other)
    from gammalab.dilation import spectra_distance

    assert spectra_distance(a.spectra, b.spectra) > 1e-3


# converse construction --------------------------------------------------


def test_admissible_scalar_formula():
    ft = np.array([0.1, 0.2j, -0.3, 0.2, 0.05, 0.4])
    r = admissible_construct7(np.array([[0.5]]), [np.array([[v]]) for v in ft], 40)
    want = np.conj(ft) + ft[::-1] * 0.5
    got = np.array([m[0, 0] for m in r.tuple.mats[:6]])
    assert np.allclose(got, want, atol=1e-10)


def test_admissible_diagonal_roundtrip():
    T7 = np.diag([0.3, -0.5j, 0.2 + 0.1j])
    Ft = diag_symbol_family7(5, 3)
    r = admissible_construct7(T7, Ft, 32, 1e-8, F=[adjoint(x) for x in Ft])
    assert r.report.passed, r.report.format()
    Gh = diag_symbol_family5(5, 3)
    r5 = admissible_construct5(T7, Gh, 32, 1e-8, G=[adjoint(x) for x in Gh])
    assert r5.report.passed, r5.report.format()


def test_admissible_noncommuting_flagged(rng):
    T7 = np.diag([0.3, 0.4])
    Ft = [0.2 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) for _ in range(6)]
    r = admissible_construct7(T7, Ft, 16)
    assert not r.report.passed
    assert not r.report["[F_i,F_j]=0"].passed


def test_admissible_requires_pure():
    with pytest.raises(NotPure):
        admissible_construct7(np.eye(1), [np.zeros((0, 0))] * 6, 4)


# circulant and Wold ------------------------------------------------------


def test_circulant_scalar_single_mode():
    ft = [np.array([[v]]) for v in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)]
    t = circulant_gamma_unitary(ft, 1)
    assert t.n == 1 and t.mats[6][0, 0] == 1
    assert t.mats[0][0, 0] == pytest.approx(0.1 + 0.6)


@pytest.mark.parametrize("M", [1, 2, 4, 8])
def test_circulant_checks(M):
    t = circulant_gamma_unitary(diag_symbol_family7(M, 2), M, form="circulant")
    assert gamma_isometry_check7(t, 1e-12).passed
    assert gamma_unitary_check7(t.mats, 1e-12).passed
    s = circulant_gamma_unitary(diag_symbol_family5(M, 2), M, "gamma5", "circulant")
    assert gamma_isometry_check5(s, 1e-12).passed


def test_circulant_non_normal_fiber_reported():
    z = np.zeros((2, 2))
    Ft = [np.array([[0, 0.5], [0, 0]])] + [z] * 5
    t = circulant_gamma_unitary(Ft, 2)
    rep = gamma_unitary_check7(t.mats, 1e-10)
    assert rep["N_i normal"].residual > 0.1


def test_circulant_norm_violation():
    with pytest.raises(NormViolation):
        circulant_gamma_unitary([np.eye(1)] * 6, 4)


def _stack(a, b):
    return Gamma7Tuple([scipy.linalg.block_diag(x, y) for x, y in zip(a.mats, b.mats)])


def test_wold_cases():
    P = pencil_model7(diag_symbol_family7(1, 2), 5)
    U = circulant_unitary(2, 1, 4)
    assert wold_verify(P, 10, 2).passed
    assert wold_verify(U, 0, 1).passed
    V = _stack(P, U)
    assert wold_verify(V, 10, 2).passed
    mats = [m.copy() for m in V.mats]
    mats[4][2, 12] += 1e-3
    rep = wold_verify(Gamma7Tuple(mats), 10, 2)
    assert not rep.passed
    assert rep.data["worst_cross"][:2] == ("T5", "upper-right")
    assert rep.data["worst_cross"][2] == pytest.approx(1e-3)


def test_admissible_residual_follows_truncation_tail():
    T7 = np.diag([0.9, -0.85j])
    Ft = diag_symbol_family7(2, 2)
    r = admissible_construct7(T7, Ft, 32, 1e-8, F=[adjoint(x) for x in Ft])
    rec = r.report["adjoint fundamental recovery"]
    assert rec.residual > 1e-8
    assert rec.passed  # tolerance carries the tail allowance
    assert rec.residual <= r.report.data["tail"]
    r64 = admissible_construct7(T7, Ft, 256, 1e-8)
    assert r64.report["adjoint fundamental recovery"].residual <= 1e-8
