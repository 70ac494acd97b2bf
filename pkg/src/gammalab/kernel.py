"""Dense complex linear algebra primitives.

Everything else in the package is built from these helpers: norms, spectral
and numerical radii, Hermitian square roots, defect operators, the power
doubling limit ``lim T^n T*^n`` and simultaneous diagonalization of commuting
normal matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import (
    NoConvergence,
    NotCommuting,
    NotContraction,
    NotNormal,
    NotPSD,
    ShapeError,
)

#: Slack allowed on ``||T|| <= 1`` before a matrix is rejected as a contraction.
CONTRACTION_SLACK = 1e-10


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Convert input to a finite 2-D complex array.

    Args:
        A: array-like, scalar or nested list.
        name: label used in error messages.

    Returns:
        A new ``complex128`` array with ``ndim == 2``.

    Raises:
        ShapeError: if the input is not two dimensional.
        ValueError: if any entry is NaN or infinite.
    """
    M = np.array(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise ShapeError(f"{name} must be two dimensional, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def as_square(A, name: str = "matrix") -> np.ndarray:
    M = as_matrix(A, name)
    if M.shape[0] != M.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {M.shape}")
    return M


def adjoint(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(A).T


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def operator_norm(A) -> float:
    """Largest singular value of ``A`` (0 for empty matrices)."""
    M = as_matrix(A)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def spectral_radius(A) -> float:
    """Largest eigenvalue modulus of a square matrix."""
    M = as_square(A)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(M))))


def _real_part_top(A: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    # lambda_max of Re(e^{i theta} A) for a batch of angles
    phase = np.exp(1j * np.asarray(thetas))[:, None, None]
    H = (phase * A + np.conj(phase) * adjoint(A)) / 2
    return np.linalg.eigvalsh(H)[:, -1]


def numerical_radius(A, tol: float = 1e-8, grid: int = 720, max_candidates: int = 8) -> float:
    """Numerical radius ``max |<Ax, x>|`` over unit vectors.

    Uses ``w(A) = max_theta lambda_max(Re(e^{i theta} A))``. The angle is
    sampled on a uniform grid and the most promising brackets are refined by
    golden-section search. The map is Lipschitz in theta with constant
    ``||A||``, so brackets that cannot beat the best grid value by more than
    that margin are skipped.

    Args:
        A: square matrix.
        tol: target absolute accuracy.
        grid: number of uniform angles.
        max_candidates: cap on refined brackets.

    Returns:
        The numerical radius.
    """
    M = as_square(A)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if M.size == 0:
        return 0.0
    lip = operator_norm(M)
    if lip == 0.0:
        return 0.0
    step = 2 * np.pi / grid
    thetas = step * np.arange(grid)
    vals = _real_part_top(M, thetas)
    best = float(vals.max())
    if lip * step / 2 <= tol:
        return best
    # local maxima of the periodic grid that could still hide the optimum
    left, right = np.roll(vals, 1), np.roll(vals, -1)
    is_peak = (vals >= left) & (vals >= right) & (vals >= best - lip * step)
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(vals[peaks])[::-1][:max_candidates]]
    golden = (np.sqrt(5) - 1) / 2

    def f(t):
        return float(_real_part_top(M, np.array([t]))[0])

    for k in peaks:
        a, b = thetas[k] - step, thetas[k] + step
        c, d = b - golden * (b - a), a + golden * (b - a)
        fc, fd = f(c), f(d)
        while (b - a) * lip > tol:
            if fc >= fd:
                b, d, fd = d, c, fc
                c = b - golden * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + golden * (b - a)
                fd = f(d)
        best = max(best, fc, fd)
    return best


@dataclass
class HermitianSpectrum:
    """Eigen-decomposition of a Hermitian matrix.

    Attributes:
        eigenvalues: ascending real eigenvalues.
        eigenvectors: orthonormal columns, aligned with ``eigenvalues``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ adjoint(V)


def hermitian_spectrum(H, herm_tol: float = 1e-10) -> HermitianSpectrum:
    """Eigen-decompose ``H`` after checking it is Hermitian."""
    M = as_square(H)
    scale = max(1.0, operator_norm(M))
    if operator_norm(M - adjoint(M)) > herm_tol * scale:
        raise ValueError("matrix is not Hermitian")
    w, V = np.linalg.eigh((M + adjoint(M)) / 2)
    return HermitianSpectrum(w, V)


def psd_sqrt(H, clip_tol: float = 1e-10) -> np.ndarray:
    """Hermitian positive semidefinite square root.

    Eigenvalues in ``[-clip_tol, 0)`` are clipped to zero.

    Raises:
        NotPSD: if the smallest eigenvalue is below ``-clip_tol``.
    """
    spec = hermitian_spectrum(H)
    w = spec.eigenvalues
    if w.size and w[0] < -clip_tol:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} below -{clip_tol:.1e}", float(w[0]))
    root = np.sqrt(np.clip(w, 0.0, None))
    V = spec.eigenvectors
    return (V * root) @ adjoint(V)


@dataclass
class SubspaceBasis:
    """Orthonormal frame of a subspace of ``C^ambient_dim``.

    Attributes:
        ambient_dim: dimension of the ambient space.
        frame: ``ambient_dim x rank`` matrix with orthonormal columns.
        rank_tol: the cutoff used to decide the rank.
    """

    ambient_dim: int
    frame: np.ndarray
    rank_tol: float

    @property
    def rank(self) -> int:
        return int(self.frame.shape[1])

    @property
    def projector(self) -> np.ndarray:
        return self.frame @ adjoint(self.frame)

    def compress(self, A: np.ndarray, codomain: "SubspaceBasis | None" = None) -> np.ndarray:
        """Matrix of ``A`` restricted to this subspace (into ``codomain``)."""
        out = self if codomain is None else codomain
        return adjoint(out.frame) @ A @ self.frame

    def embed(self, X: np.ndarray, codomain: "SubspaceBasis | None" = None) -> np.ndarray:
        """Ambient matrix of an operator given in subspace coordinates."""
        out = self if codomain is None else codomain
        return out.frame @ X @ adjoint(self.frame)


def canonical_frame(vectors: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal frame for the span of orthonormal ``vectors``.

    The frame is the Q factor of a pivoted QR of the orthogonal projector,
    with phases fixed so that the R diagonal is positive. A coordinate
    subspace therefore gets the matching standard basis vectors, which keeps
    diagonal inputs diagonal.
    """
    n, r = vectors.shape
    if r == 0:
        return np.zeros((n, 0), dtype=complex)
    P = vectors @ adjoint(vectors)
    Q, R, _ = scipy.linalg.qr(P, pivoting=True, mode="economic")
    d = np.diag(R)[:r]
    phase = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1), 1)
    frame = Q[:, :r] * phase
    # pull the frame exactly into the span, then re-orthonormalize
    frame = vectors @ (adjoint(vectors) @ frame)
    U, _, Vh = np.linalg.svd(frame, full_matrices=False)
    return U @ Vh


def check_contraction(T: np.ndarray, name: str = "T") -> float:
    nrm = operator_norm(T)
    if nrm > 1 + CONTRACTION_SLACK:
        raise NotContraction(f"{name} has norm {nrm:.12g} > 1", nrm)
    return nrm


def defect_pair(T, rank_tol: float | None = None) -> tuple[np.ndarray, SubspaceBasis]:
    """Defect operator ``D_T = (I - T*T)^(1/2)`` and a frame of its range.

    Directions where ``I - T*T`` has an eigenvalue at or below ``rank_tol``
    are treated as isometric: they are dropped from the frame and ``D_T`` is
    set to zero on them, so ``D_T`` and the frame always agree. The default
    cutoff is ``1e-12 * max(1, ||T||^2)``, applied to the eigenvalues of
    ``I - T*T`` (the squares of the defect singular values).

    Args:
        T: contraction.
        rank_tol: eigenvalue cutoff for ``I - T*T``.

    Returns:
        ``(D, basis)`` with ``D`` Hermitian PSD and ``basis`` spanning ``Ran D``.

    Raises:
        NotContraction: if ``||T|| > 1 + 1e-10``.
    """
    M = as_matrix(T, "T")
    nrm = check_contraction(M)
    n = M.shape[1]
    scale = max(1.0, nrm**2)
    cut = 1e-12 * scale if rank_tol is None else float(rank_tol)
    H = np.eye(n) - adjoint(M) @ M
    w, V = np.linalg.eigh((H + adjoint(H)) / 2)
    clip = 1e-10 * scale + max(0.0, nrm**2 - 1)
    if w.size and w[0] < -clip:
        raise NotPSD(f"I - T*T has eigenvalue {w[0]:.3e}", float(w[0]))
    keep = w > cut
    Vk = V[:, keep]
    D = (Vk * np.sqrt(w[keep])) @ adjoint(Vk)
    return D, SubspaceBasis(n, canonical_frame(Vk), cut)


def sot_limit_q(
    T,
    tol: float = 1e-12,
    max_doublings: int = 64,
    confirm: int = 3,
    return_history: bool = False,
):
    """Square root of ``lim T^n T*^n`` by repeated squaring.

    With ``P_0 = T`` and ``P_{k+1} = P_k^2`` the sequence
    ``A_k = P_k P_k*`` samples ``T^n T*^n`` at ``n = 2^k``. Iteration stops
    once ``||A_{k+1} - A_k|| <= tol`` for ``confirm`` consecutive steps; the
    extra steps guard against eigenvalues so close to the unit circle that a
    single step looks stationary. It also stops when a step already below
    ``max(100 tol, 1e-10)`` is followed by a larger one, since growth there is
    rounding on unimodular eigenvalues doubling with each squaring.

    Args:
        T: contraction.
        tol: stopping tolerance on consecutive iterates.
        max_doublings: maximum number of squarings.
        confirm: number of consecutive small steps required.
        return_history: also return the list of iterates ``A_k``.

    Returns:
        ``Q`` (PSD, ``Q <= I``), or ``(Q, history)``.

    Raises:
        NotContraction: if ``||T|| > 1 + 1e-10``.
        NoConvergence: if the iterates have not settled after ``max_doublings``.
    """
    P = as_square(T, "T")
    check_contraction(P)
    A_prev = P @ adjoint(P)
    history = [A_prev]
    small = 0
    res = np.inf
    floor = max(100 * tol, 1e-10)
    for _ in range(max_doublings):
        P = P @ P
        A = P @ adjoint(P)
        last = res
        res = operator_norm(A - A_prev)
        if last <= floor and res > last:
            # steps grow again: rounding on the unitary part doubles with
            # every squaring, so the previous iterate is the best estimate
            res = last
            break
        history.append(A)
        A_prev = A
        small = small + 1 if res <= tol else 0
        if small >= confirm:
            break
    else:
        raise NoConvergence(f"power doubling did not settle, last step {res:.3e}", float(res))
    # eigenvalues below the stopping tolerance are indistinguishable from 0;
    # zero them so the square root does not amplify rounding to sqrt(eps)
    w, V = np.linalg.eigh((A_prev + adjoint(A_prev)) / 2)
    if w.size and w.min() < -1e-8:
        raise NotPSD(f"limit has eigenvalue {w.min():.3e}", float(w.min()))
    w = np.where(w > max(tol, 1e-14), w, 0.0)
    Q = (V * np.sqrt(w)) @ adjoint(V)
    if return_history:
        return Q, history
    return Q


def range_basis(Q: np.ndarray, rank_tol: float = 1e-6) -> tuple[SubspaceBasis, np.ndarray]:
    """Frame of the range of a PSD matrix and the eigenvalues kept."""
    w, V = np.linalg.eigh((Q + adjoint(Q)) / 2)
    keep = w > rank_tol
    frame = canonical_frame(V[:, keep])
    return SubspaceBasis(Q.shape[0], frame, rank_tol), w[keep]


def _check_commuting_normal(mats: Sequence[np.ndarray], tol: float, scale: float) -> None:
    for i, N in enumerate(mats):
        r = operator_norm(N @ adjoint(N) - adjoint(N) @ N)
        if r > tol * scale**2:
            raise NotNormal(f"matrix {i} is not normal (residual {r:.3e})", r)
        for j in range(i + 1, len(mats)):
            r = operator_norm(commutator(N, mats[j]))
            if r > tol * scale**2:
                raise NotCommuting(f"matrices {i} and {j} do not commute (residual {r:.3e})", r)


def _split(mats, basis, rng, tol, scale, depth):
    k = basis.shape[1]
    if k <= 1:
        return basis
    compressed = [adjoint(basis) @ N @ basis for N in mats]
    parts = []
    for C in compressed:
        parts.append((C + adjoint(C)) / 2)
        parts.append((C - adjoint(C)) / 2j)
    coef = rng.standard_normal(len(parts))
    H = sum(c * P for c, P in zip(coef, parts))
    w, V = np.linalg.eigh((H + adjoint(H)) / 2)
    gap = max(1e3 * tol, 1e-9) * scale * np.abs(coef).sum()
    cuts = np.flatnonzero(np.diff(w) > gap) + 1
    blocks = []
    for idx in np.split(np.arange(k), cuts):
        sub = basis @ V[:, idx]
        if len(idx) > 1 and depth < 12:
            scalar = all(
                operator_norm(C - np.trace(C) / len(idx) * np.eye(len(idx))) <= 10 * tol * scale
                for C in (adjoint(sub) @ N @ sub for N in mats)
            )
            if not scalar:
                sub = _split(mats, sub, rng, tol, scale, depth + 1)
        blocks.append(sub)
    return np.hstack(blocks)


def joint_diagonalize(mats: Sequence, tol: float = 1e-8, seed: int = 0):
    """Simultaneously diagonalize commuting normal matrices.

    The Hermitian and skew parts of commuting normal matrices all commute, so
    a random real combination of them is Hermitian and shares an eigenbasis
    with the whole family. Eigenvalue clusters of that combination are split
    again with fresh coefficients until every matrix is scalar on each cluster.

    Args:
        mats: commuting normal square matrices of a common size.
        tol: relative tolerance for the commutation and normality checks.
        seed: seed for the random combinations.

    Returns:
        ``(U, spectra)`` where ``U`` is unitary and ``spectra[i, k]`` is the
        ``k``-th diagonal entry of ``U* mats[i] U``. Column ``k`` of
        ``spectra`` is one joint eigenvalue.

    Raises:
        NotCommuting: if two matrices fail to commute.
        NotNormal: if a matrix is not normal.
    """
    mats = [as_square(N) for N in mats]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[0]
    if any(N.shape != (n, n) for N in mats):
        raise ShapeError("matrices must share one square shape")
    scale = max([1.0] + [operator_norm(N) for N in mats])
    _check_commuting_normal(mats, tol, scale)
    rng = np.random.default_rng(seed)
    U = _split(mats, np.eye(n, dtype=complex), rng, tol, scale, 0)
    spectra = np.array([np.diag(adjoint(U) @ N @ U) for N in mats])
    return U, spectra
