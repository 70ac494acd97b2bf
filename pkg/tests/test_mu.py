import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_complex
from gammalab.errors import MissingWitness, ShapeError
from gammalab.mu import (
    E2211,
    E3212,
    E3311,
    BlockStructure,
    GammaPoint,
    in_gamma,
    k1_set_check,
    k_set_check,
    mu_bounds,
    mu_lower,
    mu_upper,
    symmetrize3,
    symmetrize5,
    symmetrize7,
)


def minor(A, idx):
    # Leibniz expansion, independent of numpy.linalg.det
    idx = list(idx)
    total = 0
    for perm in itertools.permutations(range(len(idx))):
        sign = np.linalg.det(np.eye(len(idx))[list(perm)])
        prod = 1
        for r, c in enumerate(perm):
            prod *= A[idx[r], idx[c]]
        total += round(sign) * prod
    return total


def test_structure_parse():
    st_ = BlockStructure.parse("3;2;1,2")
    assert st_ == E3212 and st_.s == 2
    with pytest.raises(ValueError):
        BlockStructure.parse("3;2;1,1")
    with pytest.raises(ValueError):
        BlockStructure(3, (0, 3))


def test_zero_matrix_gives_zero():
    for st_ in (E3311, E3212):
        b = mu_bounds(np.zeros((3, 3)), st_)
        assert b.lower == 0 and b.upper == 0


def test_single_block_is_spectral_radius(rng):
    A = random_complex(rng, 3)
    lo, _ = mu_lower(A, BlockStructure(3, (3,)), phase_grid=1)
    assert lo == pytest.approx(np.max(np.abs(np.linalg.eigvals(A))), abs=1e-12)


def test_diagonal_closed_form(rng):
    d = random_complex(rng, 1, 3)[0]
    A = np.diag(d)
    b = mu_bounds(A, E3311, phase_grid=16)
    assert b.lower == pytest.approx(np.abs(d).max(), abs=1e-6)
    assert b.upper == pytest.approx(np.abs(d).max(), abs=1e-6)


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        mu_lower(np.eye(2), E3311)


def test_witness_makes_singular(rng):
    A = random_complex(rng, 3)
    b = mu_bounds(A, E3212, phase_grid=32)
    X = np.diag(E3212.expand(b.phase_witness)) / b.lower
    assert abs(np.linalg.det(np.eye(3) - A @ X)) <= 1e-6
    assert np.allclose(np.abs(b.phase_witness), 1)


@given(st.integers(0, 10_000), st.sampled_from(["E3311", "E3212", "E2211"]))
def test_bracket_and_scaling(seed, name):
    st_ = {"E3311": E3311, "E3212": E3212, "E2211": E2211}[name]
    rng = np.random.default_rng(seed)
    A = random_complex(rng, st_.n)
    b = mu_bounds(A, st_, phase_grid=32, iters=32)
    assert b.lower <= b.upper + 1e-9
    c = complex(*rng.standard_normal(2))
    up2, _ = mu_upper(c * A, st_, 32)
    assert up2 == pytest.approx(abs(c) * b.upper, rel=1e-6)


def test_lower_monotone_along_nested_grids(rng):
    A = random_complex(rng, 3)
    vals = [mu_lower(A, E3311, g, refine=False)[0] for g in (4, 8, 16, 32)]
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))


def test_symmetrize_examples():
    assert np.allclose(symmetrize7(np.eye(3)).coords, 1)
    assert np.allclose(symmetrize7(np.zeros((3, 3))).coords, 0)
    a, b, c = 0.3 + 0.1j, -0.7, 0.2j
    assert np.allclose(symmetrize7(np.diag([a, b, c])).coords, [a, b, a * b, c, a * c, b * c, a * b * c])
    assert np.allclose(symmetrize5(np.eye(3)).coords, [1, 2, 1, 2, 1])
    assert np.allclose(symmetrize5(np.diag([a, b, c])).coords, [a, a * b + a * c, a * b * c, b + c, b * c])
    assert np.allclose(symmetrize3(np.eye(2)).coords, [1, 1, 1])
    assert np.allclose(symmetrize3(np.array([[0, 1], [0, 0]])).coords, 0)
    with pytest.raises(ShapeError):
        symmetrize7(np.eye(2))


@given(st.integers(0, 10_000))
def test_symmetrize_against_minor_oracle(seed):
    A = random_complex(np.random.default_rng(seed), 3)
    want7 = [A[0, 0], A[1, 1], minor(A, [0, 1]), A[2, 2], minor(A, [0, 2]), minor(A, [1, 2]), minor(A, [0, 1, 2])]
    assert np.allclose(symmetrize7(A).coords, want7, atol=1e-13, rtol=0)
    want5 = [A[0, 0], minor(A, [0, 1]) + minor(A, [0, 2]), minor(A, [0, 1, 2]), A[1, 1] + A[2, 2], minor(A, [1, 2])]
    assert np.allclose(symmetrize5(A).coords, want5, atol=1e-13, rtol=0)


def test_k_set_examples(rng):
    ok, _ = k_set_check(GammaPoint("E3311", np.ones(7)))
    assert ok
    ok, res = k_set_check(GammaPoint("E3311", [1, 1, 1, 1, 1, 1, 0.5]))
    assert not ok and res["|x7|=1"] == pytest.approx(0.5)
    ph = np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
    ok, res = k_set_check(symmetrize7(np.diag(ph)))
    assert ok, res
    assert "mu<=1" in res


def test_k1_set_examples(rng):
    assert k1_set_check(GammaPoint("E3212", [1, 2, 1, 2, 1]))[0]
    assert not k1_set_check(GammaPoint("E3212", [0.1, 0.2, 0, 0.3, 0.1]))[0]
    ph = np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
    assert k1_set_check(symmetrize5(np.diag(ph)))[0]


def test_in_gamma_needs_witness():
    with pytest.raises(MissingWitness):
        in_gamma(GammaPoint("E3311", np.zeros(7)))
    assert in_gamma(symmetrize7(0.5 * np.eye(3)))
    assert not in_gamma(symmetrize7(1.5 * np.eye(3)))
