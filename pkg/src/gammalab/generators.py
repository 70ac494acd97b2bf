"""Seeded constructors of valid test objects.

Every generator is deterministic in its seed. Diagonal symbol families are
the backbone: they satisfy the commutativity conditions identically and
their pencil norms are controlled slot by slot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from .dilation import circulant_gamma_unitary
from .errors import MissingWitness
from .fundamental import Gamma5Tuple, Gamma7Tuple
from .hardy import pencil_model5, pencil_model7
from .mu import STRUCTURE, GammaPoint, SYMMETRIZE, mu_upper

KINDS = (
    "diagIsometry7",
    "diagIsometry5",
    "compressed7",
    "compressed5",
    "scalar7",
    "scalar5",
    "circulantUnitary",
    "mixed7",
    "mixed5",
)


def _phases(rng, size) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(size))


def _paired_budget(rng, d: int, split: float | None) -> tuple[np.ndarray, np.ndarray]:
    # slotwise moduli (a, b) with a + b <= 1
    total = rng.random(d)
    frac = rng.random(d) if split is None else np.full(d, float(split))
    a = total * frac
    b = total * (1 - frac)
    return a * _phases(rng, d), b * _phases(rng, d)


def diag_symbol_family7(seed: int, d: int, split: float | None = None) -> list:
    """Six diagonal ``d x d`` matrices with ``|f_i(k)| + |f_{7-i}(k)| <= 1``.

    Args:
        seed: RNG seed.
        d: fiber dimension.
        split: optional fixed fraction of each slot budget given to ``f_i``
            (``i <= 3``); random when omitted.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    rng = np.random.default_rng(seed)
    F = [None] * 6
    for i in range(3):
        a, b = _paired_budget(rng, d, split)
        F[i], F[5 - i] = np.diag(a), np.diag(b)
    return F


def diag_symbol_family5(seed: int, d: int, split: float | None = None) -> list:
    """Diagonal ``(G1, G2, Gt1, Gt2)`` with ``|g1| + |gt2| <= 1`` and
    ``|g2| + |gt1| <= 1`` per slot, so the pencils ``G1* + Gt2 z`` and
    ``Gt2* + G1 z`` have sup norm at most 1 and ``2G2* + 2Gt1 z``,
    ``2Gt1* + 2G2 z`` at most 2."""
    if d < 1:
        raise ValueError("d must be at least 1")
    rng = np.random.default_rng(seed)
    g1, gt2 = _paired_budget(rng, d, split)
    g2, gt1 = _paired_budget(rng, d, split)
    return [np.diag(g1), np.diag(g2), np.diag(gt1), np.diag(gt2)]


def compressed_contraction7(seed: int, d: int, k: int, split: float | None = None) -> Gamma7Tuple:
    """Pencil model of a diagonal family compressed to levels ``0..k-1``.

    The span of the first ``k`` levels is co-invariant for every analytic
    pencil, so the compression is multiplicative and yields a commuting
    7-tuple with ``T_7`` the nilpotent truncated shift.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    return pencil_model7(diag_symbol_family7(seed, d, split), k)


def compressed_contraction5(seed: int, d: int, k: int, split: float | None = None) -> Gamma5Tuple:
    """5-tuple analogue of :func:`compressed_contraction7`."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return pencil_model5(*diag_symbol_family5(seed, d, split), k)


def scalar_tuple7(point: GammaPoint, tol: float = 1e-8, iters: int = 64) -> Gamma7Tuple:
    """Seven ``1 x 1`` matrices from a witnessed point of the domain.

    Raises:
        MissingWitness: if the point carries no witness or the witness has
            ``mu_upper > 1 + tol``.
    """
    return Gamma7Tuple(_scalar(point, "E3311", tol, iters))


def scalar_tuple5(point: GammaPoint, tol: float = 1e-8, iters: int = 64) -> Gamma5Tuple:
    """Five ``1 x 1`` matrices from a witnessed ``E3212`` point."""
    return Gamma5Tuple(_scalar(point, "E3212", tol, iters))


def _scalar(point: GammaPoint, variant: str, tol: float, iters: int) -> list:
    if point.variant != variant:
        raise ValueError(f"expected a {variant} point")
    if point.witness is None:
        raise MissingWitness("scalar tuples need a witness matrix")
    upper, _ = mu_upper(point.witness, STRUCTURE[variant], iters)
    if upper > 1 + tol:
        raise MissingWitness(f"witness has mu upper bound {upper:.6g} > 1")
    return [np.array([[c]], dtype=complex) for c in point.coords]


def random_witness_point(seed: int, variant: str = "E3311", radius: float = 0.9, iters: int = 64) -> GammaPoint:
    """Symmetrization of a random matrix scaled to ``mu_upper = radius``."""
    rng = np.random.default_rng(seed)
    n = STRUCTURE[variant].n
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    upper, _ = mu_upper(A, STRUCTURE[variant], iters)
    A = A * (radius / upper)
    return SYMMETRIZE[variant](A)


def scalar_fundamental7(t: Gamma7Tuple) -> np.ndarray:
    """Closed form ``F_i = (t_i - conj(t_{7-i}) t_7) / (1 - |t_7|^2)`` for scalar tuples."""
    x = np.array([m[0, 0] for m in t.mats])
    return (x[:6] - np.conj(x[5::-1]) * x[6]) / (1 - abs(x[6]) ** 2)


def scalar_fundamental5(s: Gamma5Tuple) -> np.ndarray:
    """Closed form ``(G1, G2, Gt1, Gt2)`` for scalar 5-tuples, using the
    halved equations for ``G2`` and ``Gt1``."""
    x1, x2, x3, y1, y2 = (m[0, 0] for m in s.mats)
    den = 1 - abs(x3) ** 2
    return np.array(
        [
            (x1 - np.conj(y2) * x3) / den,
            (x2 - np.conj(y1) * x3) / (2 * den),
            (y1 - np.conj(x2) * x3) / (2 * den),
            (y2 - np.conj(x1) * x3) / den,
        ]
    )


def random_unitary(seed: int, n: int) -> np.ndarray:
    """Haar random unitary."""
    if n == 1:
        return np.exp(2j * np.pi * np.random.default_rng(seed).random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=seed)


def circulant_unitary(seed: int, d: int, modes: int, variant: str = "gamma7", form: str = "diagonal"):
    """Circulant Gamma-unitary built from a diagonal family."""
    if variant == "gamma7":
        syms = diag_symbol_family7(seed, d)
    else:
        syms = diag_symbol_family5(seed, d)
    return circulant_gamma_unitary(syms, modes, variant, form)


def mixed_tuple7(seed: int, unitary_dim: int, stable_levels: int, d: int = 1, conjugate: bool = False) -> Gamma7Tuple:
    """Direct sum ``(circulant unitary) (+) (compressed contraction)``.

    The unitary summand has dimension ``unitary_dim`` (``d = 1`` fibers,
    ``unitary_dim`` modes) and the stable summand is a compressed model
    with ``stable_levels`` levels and fiber ``d``. With ``conjugate=True``
    the sum is rotated by a Haar unitary.
    """
    mats_u = circulant_unitary(seed, 1, unitary_dim).mats if unitary_dim else None
    mats_s = compressed_contraction7(seed + 1, d, stable_levels).mats if stable_levels else None
    return _direct_sum(Gamma7Tuple, mats_u, mats_s, seed, conjugate, 7)


def mixed_tuple5(seed: int, unitary_dim: int, stable_levels: int, d: int = 1, conjugate: bool = False) -> Gamma5Tuple:
    """5-tuple analogue of :func:`mixed_tuple7`."""
    mats_u = circulant_unitary(seed, 1, unitary_dim, "gamma5").mats if unitary_dim else None
    mats_s = compressed_contraction5(seed + 1, d, stable_levels).mats if stable_levels else None
    return _direct_sum(Gamma5Tuple, mats_u, mats_s, seed, conjugate, 5)


def _direct_sum(cls, a, b, seed, conjugate, count):
    parts = [p for p in (a, b) if p is not None]
    if not parts:
        raise ValueError("empty direct sum")
    mats = [scipy.linalg.block_diag(*[p[j] for p in parts]).astype(complex) for j in range(count)]
    t = cls(mats)
    if conjugate:
        t = t.conjugate(random_unitary(seed + 2, t.n))
    return t


@dataclass(frozen=True)
class GeneratorSpec:
    """Inputs of :func:`generate`.

    Attributes:
        kind: one of :data:`KINDS`.
        seed: RNG seed.
        fiber_dim: fiber dimension ``d`` (or unitary dimension for ``mixed``).
        levels: Hardy levels, compression depth or number of modes.
    """

    kind: str
    seed: int = 0
    fiber_dim: int = 1
    levels: int = 4

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; choose from {', '.join(KINDS)}")


def generate(spec: GeneratorSpec):
    """Dispatch on ``spec.kind`` and return the generated tuple."""
    k, s, d, N = spec.kind, spec.seed, spec.fiber_dim, spec.levels
    if k == "diagIsometry7":
        return pencil_model7(diag_symbol_family7(s, d), N)
    if k == "diagIsometry5":
        return pencil_model5(*diag_symbol_family5(s, d), N)
    if k == "compressed7":
        return compressed_contraction7(s, d, N)
    if k == "compressed5":
        return compressed_contraction5(s, d, N)
    if k == "scalar7":
        return scalar_tuple7(random_witness_point(s, "E3311"))
    if k == "scalar5":
        return scalar_tuple5(random_witness_point(s, "E3212"))
    if k == "circulantUnitary":
        return circulant_unitary(s, d, N)
    if k == "mixed7":
        return mixed_tuple7(s, d, N)
    return mixed_tuple5(s, d, N)
