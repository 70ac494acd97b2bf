"""Truncated Hardy-space machinery.

A vector of the truncated space ``H^2_N(E)`` is the stack of its Taylor
coefficients ``[f_0; f_1; ...; f_{N-1}]`` with each ``f_k`` in the fiber
``E = C^d``. Multiplication by an analytic symbol ``sum_k c_k z^k`` is the
block lower-triangular Toeplitz matrix with ``c_{i-j}`` in block ``(i, j)``.
Because such matrices are lower triangular, truncating to the first ``N``
levels commutes with products; only identities that involve adjoints of
the shift see the top level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import NotPure, ShapeError
from .fundamental import Gamma5Tuple, Gamma7Tuple
from .kernel import (
    SubspaceBasis,
    adjoint,
    as_matrix,
    as_square,
    check_contraction,
    defect_pair,
    operator_norm,
    spectral_radius,
)


@dataclass(frozen=True)
class TruncatedHardySpace:
    """First ``levels`` Taylor coefficients of ``C^fiber_dim``-valued functions."""

    levels: int
    fiber_dim: int

    def __post_init__(self):
        if self.levels < 1 or self.fiber_dim < 0:
            raise ValueError("levels must be >= 1 and fiber_dim >= 0")

    @property
    def dim(self) -> int:
        return self.levels * self.fiber_dim

    def level_slice(self, k: int) -> slice:
        return slice(k * self.fiber_dim, (k + 1) * self.fiber_dim)

    def mask(self, keep_levels: int) -> np.ndarray:
        """Boolean mask of the coordinates in levels ``0..keep_levels-1``."""
        m = np.zeros(self.dim, dtype=bool)
        m[: keep_levels * self.fiber_dim] = True
        return m


def truncated_shift(levels: int, fiber_dim: int) -> np.ndarray:
    """Block forward shift; the top level is mapped to zero."""
    if levels < 1:
        raise ValueError("levels must be at least 1")
    return np.kron(np.eye(levels, k=-1), np.eye(fiber_dim)).astype(complex)


def block_toeplitz(coefficients: Sequence, levels: int) -> np.ndarray:
    """Lower-triangular block Toeplitz matrix with ``coefficients[k]`` on
    the ``k``-th block subdiagonal (missing coefficients count as zero)."""
    coefficients = [as_matrix(c) for c in coefficients]
    if not coefficients:
        raise ValueError("need at least one coefficient")
    p, q = coefficients[0].shape
    if any(c.shape != (p, q) for c in coefficients):
        raise ShapeError("all coefficients must share a shape")
    out = np.zeros((levels * p, levels * q), dtype=complex)
    for k, c in enumerate(coefficients[:levels]):
        if not np.any(c):
            continue
        for j in range(levels - k):
            i = j + k
            out[i * p:(i + 1) * p, j * q:(j + 1) * q] = c
    return out


def pencil_operator(C0, C1, levels: int) -> np.ndarray:
    """Multiplication by ``C0 + C1 z``: ``C0`` on the block diagonal and
    ``C1`` on the first block subdiagonal."""
    A0, A1 = as_matrix(C0, "C0"), as_matrix(C1, "C1")
    if A0.shape != A1.shape:
        raise ShapeError("pencil coefficients must share a shape")
    return np.kron(np.eye(levels), A0) + np.kron(np.eye(levels, k=-1), A1)


@dataclass
class BlockToeplitzOperator:
    """Analytic block Toeplitz operator given by symbol coefficients.

    Attributes:
        coefficients: ``c_0..c_K``, each mapping the input fiber to the output fiber.
        levels: number of retained levels ``N``.
    """

    coefficients: list
    levels: int

    def matrix(self) -> np.ndarray:
        return block_toeplitz(self.coefficients, self.levels)


@dataclass
class ThetaSeries:
    """Taylor coefficients of the characteristic function of a contraction.

    Attributes:
        coefficients: ``c_0..c_K`` mapping the defect space of ``T`` (frame
            ``basis_in``) to the defect space of ``T*`` (frame ``basis_out``).
        tail_bound: bound on ``sum_{k>K} ||c_k||``; infinite if the
            powers of ``T`` need not decay.
        decaying: whether a geometric tail bound was certified.
        convention: ``"classical"`` or ``"literal"``.
    """

    coefficients: list
    basis_in: SubspaceBasis
    basis_out: SubspaceBasis
    tail_bound: float
    decaying: bool
    convention: str = "classical"

    @property
    def K(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, z: complex) -> np.ndarray:
        """Truncated series ``sum_k c_k z^k``."""
        out = np.zeros_like(self.coefficients[0])
        zk = 1.0 + 0j
        for c in self.coefficients:
            out = out + c * zk
            zk *= z
        return out

    def toeplitz(self, levels: int) -> BlockToeplitzOperator:
        if self.K + 1 < levels:
            raise ValueError(f"series has {self.K + 1} coefficients, need {levels}")
        return BlockToeplitzOperator(self.coefficients[:levels], levels)


def _power_tail(T: np.ndarray, K: int) -> tuple[float, bool]:
    # bound sum_{j >= K} ||T^j|| using q = ||T^p|| < 1 for some p
    TK = np.linalg.matrix_power(T, K)
    p, P = 1, T.copy()
    for _ in range(12):
        q = operator_norm(P)
        if q < 1 - 1e-12:
            return p * operator_norm(TK) / (1 - q), True
        P = P @ P
        p *= 2
    return float("inf"), False


def theta_series(T, K: int, convention: str = "classical") -> ThetaSeries:
    """Characteristic function coefficients of a contraction ``T``.

    The classical convention is
    ``Theta(z) = -T + z D_{T*} (I - z T*)^{-1} D_T``, giving
    ``c_0 = -T`` and ``c_k = D_{T*} T*^{k-1} D_T`` for ``k >= 1``.
    ``convention="literal"`` drops the factor ``z`` in front of the
    resolvent term, so ``c_0 = -T + D_{T*} D_T`` and
    ``c_k = D_{T*} T*^k D_T``; it is kept only to demonstrate that it breaks
    the identity checked by :func:`w_property_residual`.

    Args:
        T: contraction.
        K: highest retained degree.
        convention: ``"classical"`` or ``"literal"``.
    """
    M = as_square(T, "T")
    if K < 0:
        raise ValueError("K must be non-negative")
    if convention not in ("classical", "literal"):
        raise ValueError(f"unknown convention {convention!r}")
    DT, bin_ = defect_pair(M)
    DTs, bout = defect_pair(adjoint(M))
    Vi, Vo = bin_.frame, bout.frame
    Ts = adjoint(M)
    coeffs = []
    if convention == "classical":
        coeffs.append(-adjoint(Vo) @ M @ Vi)
        left = adjoint(Vo) @ DTs
        right = DT @ Vi
        for _ in range(K):
            coeffs.append(left @ right)
            left = left @ Ts
    else:
        coeffs.append(adjoint(Vo) @ (-M + DTs @ DT) @ Vi)
        left = adjoint(Vo) @ DTs @ Ts
        right = DT @ Vi
        for _ in range(K):
            coeffs.append(left @ right)
            left = left @ Ts
    tail, decaying = _power_tail(M, K)
    tail *= operator_norm(DTs) * operator_norm(DT)
    if operator_norm(DTs) * operator_norm(DT) == 0:
        tail, decaying = 0.0, True
    return ThetaSeries(coeffs, bin_, bout, tail, decaying, convention)


def theta_toeplitz(th: ThetaSeries, levels: int) -> BlockToeplitzOperator:
    """Truncated multiplication operator ``M_Theta`` on ``levels`` levels."""
    return th.toeplitz(levels)


def delta_sample(T, omega: complex, K: int = 64, clip_tol: float = 1e-12) -> np.ndarray:
    """``(I - Theta(omega)* Theta(omega))^(1/2)`` at a point of the circle.

    The series is summed through degree ``K``. Eigenvalues of
    ``I - Theta* Theta`` with modulus below ``clip_tol`` are set to zero;
    anything more negative raises :class:`NotPSD`.
    """
    from .errors import NotPSD

    th = theta_series(T, K)
    Th = th.evaluate(omega)
    r = Th.shape[1]
    if r == 0:
        return np.zeros((0, 0), dtype=complex)
    H = np.eye(r) - adjoint(Th) @ Th
    w, V = np.linalg.eigh((H + adjoint(H)) / 2)
    if w[0] < -clip_tol - th.tail_bound * 2:
        raise NotPSD(f"I - Theta*Theta has eigenvalue {w[0]:.3e}", float(w[0]))
    w = np.where(np.abs(w) <= clip_tol, 0.0, np.clip(w, 0.0, None))
    return (V * np.sqrt(w)) @ adjoint(V)


def nagy_foias_column_residual(T, omega: complex, K: int = 64, clip_tol: float = 1e-12) -> float:
    """``||Theta(omega)* Theta(omega) + Delta(omega)^2 - I||``."""
    th = theta_series(T, K)
    Th = th.evaluate(omega)
    Dl = delta_sample(T, omega, K, clip_tol)
    return operator_norm(adjoint(Th) @ Th + Dl @ Dl - np.eye(Th.shape[1]))


def build_W(T, levels: int) -> np.ndarray:
    """Stack of ``D_{T*} T*^n`` for ``n = 0..levels-1``.

    Rows are expressed in the defect frame of ``T*`` returned by
    :func:`defect_pair` for ``T*``. The finite identity
    ``W* W = I - T^N T*^N`` holds exactly up to rounding.
    """
    M = as_square(T, "T")
    check_contraction(M)
    DTs, bout = defect_pair(adjoint(M))
    Ts = adjoint(M)
    rows = []
    cur = adjoint(bout.frame) @ DTs
    for _ in range(levels):
        rows.append(cur)
        cur = cur @ Ts
    return np.vstack(rows)


def w_property_residual(T, levels: int, edge: int = 0, convention: str = "classical") -> float:
    """``||W W* + M_Theta M_Theta* - I||`` on the truncated Hardy space.

    Both ``W`` and ``M_Theta`` are block lower triangular in the level
    ordering used here, so the truncation to the first ``levels`` levels is
    an exact finite identity for the classical convention. ``edge`` top
    levels can still be excluded.
    """
    W = build_W(T, levels)
    th = theta_series(T, max(levels - 1, 0), convention)
    M = theta_toeplitz(th, levels).matrix()
    R = W @ adjoint(W) + M @ adjoint(M) - np.eye(W.shape[0])
    d = th.basis_out.rank
    keep = (levels - edge) * d
    return operator_norm(R[:keep, :keep]) if keep > 0 else 0.0


def pencil_intertwine(A0, A1, B0, B1, coefficients: Sequence, K: int) -> np.ndarray:
    """Per-degree residuals of ``(A0 + A1 z) Theta(z) = Theta(z) (B0 + B1 z)``.

    Coefficient of ``z^k`` on the left is ``A0 c_k + A1 c_{k-1}`` and on the
    right ``c_k B0 + c_{k-1} B1``. Degrees ``0..K`` are compared.
    """
    c = [as_matrix(x) for x in coefficients]
    if len(c) < K + 1:
        raise ValueError(f"need {K + 1} coefficients, have {len(c)}")
    zero = np.zeros_like(c[0])
    out = np.zeros(K + 1)
    for k in range(K + 1):
        prev = c[k - 1] if k > 0 else zero
        lhs = A0 @ c[k] + A1 @ prev
        rhs = c[k] @ B0 + prev @ B1
        out[k] = operator_norm(lhs - rhs)
    return out


def intertwine_residual7(Ft: Sequence, F: Sequence, th: ThetaSeries, K: int) -> np.ndarray:
    """Residuals of ``(Ft*_i + Ft_{7-i} z) Theta = Theta (F_i + F*_{7-i} z)``.

    Args:
        Ft: six operators on the defect space of ``T*`` (frame ``th.basis_out``).
        F: six operators on the defect space of ``T`` (frame ``th.basis_in``).
        th: characteristic function series with at least ``K + 1`` terms.
        K: highest compared degree.

    Returns:
        Array of shape ``(6, K + 1)``.
    """
    Ft = [as_matrix(x) for x in Ft]
    F = [as_matrix(x) for x in F]
    r_out, r_in = th.basis_out.rank, th.basis_in.rank
    if any(x.shape != (r_out, r_out) for x in Ft) or any(x.shape != (r_in, r_in) for x in F):
        raise ShapeError("operator shapes do not match the defect frames")
    rows = []
    for i in range(6):
        j = 5 - i
        rows.append(pencil_intertwine(adjoint(Ft[i]), Ft[j], F[i], adjoint(F[j]), th.coefficients, K))
    return np.array(rows)


def intertwine_residual5(Ghat: Sequence, G: Sequence, th: ThetaSeries, K: int) -> np.ndarray:
    """Residuals of the four 5-tuple intertwinings.

    With ``Ghat = (Gh1, Gh2, Ght1, Ght2)`` on the defect space of ``S_3*``
    and ``G = (G1, G2, Gt1, Gt2)`` on that of ``S_3``:

    1. ``(Gh1* + Ght2 z) Theta = Theta (G1 + Gt2* z)``
    2. ``(Gh2* + Ght1 z) Theta = Theta (G2 + Gt1* z)``
    3. ``(Ght1* + Gh2 z) Theta = Theta (Gt1 + G2* z)``
    4. ``(Ght2* + Gh1 z) Theta = Theta (Gt2 + G1* z)``

    Returns:
        Array of shape ``(4, K + 1)``.
    """
    h1, h2, ht1, ht2 = (as_matrix(x) for x in Ghat)
    g1, g2, gt1, gt2 = (as_matrix(x) for x in G)
    a = adjoint
    items = [
        (a(h1), ht2, g1, a(gt2)),
        (a(h2), ht1, g2, a(gt1)),
        (a(ht1), h2, gt1, a(g2)),
        (a(ht2), h1, gt2, a(g1)),
    ]
    return np.array([pencil_intertwine(A0, A1, B0, B1, th.coefficients, K) for A0, A1, B0, B1 in items])


@dataclass
class PureModel:
    """Compression of a pencil tuple to the model space of a pure contraction.

    Attributes:
        tuple: the compressed tuple in state coordinates.
        frame: orthonormal frame of the model space inside the truncated
            Hardy space, aligned with ``W`` so that state coordinates match.
        tail: ``||T_7^N||``, the size of the truncation effects.
        notes: diagnostics.
    """

    tuple: object
    frame: np.ndarray
    tail: float
    notes: list = field(default_factory=list)


def _model_frame(T7: np.ndarray, levels: int, tol: float) -> tuple[np.ndarray, SubspaceBasis, float]:
    if spectral_radius(T7) >= 1 - tol:
        raise NotPure(f"spectral radius {spectral_radius(T7):.12g} is not below 1 - {tol:g}")
    th = theta_series(T7, levels - 1)
    M = th.toeplitz(levels).matrix()
    w, V = np.linalg.eigh(M @ adjoint(M))
    U = V[:, w < 0.5]
    n = T7.shape[0]
    if U.shape[1] != n:
        raise NotPure(f"model space has dimension {U.shape[1]}, expected {n}; increase levels")
    W = build_W(T7, levels)
    X, _, Yh = np.linalg.svd(adjoint(U) @ W)
    frame = U @ (X @ Yh)
    tail = operator_norm(np.linalg.matrix_power(T7, levels))
    return frame, th.basis_out, tail


def compress_pure_model(Ft: Sequence, T7, levels: int, tol: float = 1e-9) -> PureModel:
    """Model tuple ``P_H (I x Ft*_i + M_z x Ft_{7-i})|_H`` of a pure ``T_7``.

    The model space is the orthogonal complement of ``Ran M_Theta`` in the
    truncated Hardy space over the defect space of ``T_7*``, taken as the
    spectral subspace of ``M_Theta M_Theta*`` below ``1/2``. Its frame is
    rotated to align with ``W`` so the compressed tuple is expressed in the
    coordinates of the original state space.

    Raises:
        NotPure: if ``rho(T_7) >= 1 - tol``.
    """
    M7 = as_square(T7, "T7")
    Ft = [as_matrix(x) for x in Ft]
    frame, bout, tail = _model_frame(M7, levels, tol)
    if any(x.shape != (bout.rank, bout.rank) for x in Ft):
        raise ShapeError("Ft must act on the defect space of T7*")
    mats = []
    for i in range(6):
        A = pencil_operator(adjoint(Ft[i]), Ft[5 - i], levels)
        mats.append(adjoint(frame) @ A @ frame)
    S = truncated_shift(levels, bout.rank)
    mats.append(adjoint(frame) @ S @ frame)
    return PureModel(Gamma7Tuple(mats), frame, tail)


def compress_pure_model5(Ghat: Sequence, S3, levels: int, tol: float = 1e-9) -> PureModel:
    """5-tuple analogue of :func:`compress_pure_model` with the pencils
    ``Gh1* + Ght2 z``, ``2Gh2* + 2Ght1 z``, ``z``, ``2Ght1* + 2Gh2 z`` and
    ``Ght2* + Gh1 z``."""
    M3 = as_square(S3, "S3")
    h1, h2, ht1, ht2 = (as_matrix(x) for x in Ghat)
    frame, bout, tail = _model_frame(M3, levels, tol)
    pencils = _pencils5(h1, h2, ht1, ht2, bout.rank)
    mats = [adjoint(frame) @ pencil_operator(c0, c1, levels) @ frame for c0, c1 in pencils]
    return PureModel(Gamma5Tuple(mats), frame, tail)


def _pencils5(G1, G2, Gt1, Gt2, d: int) -> list:
    # symbols of the 5-tuple isometric model in the order S1, S2, S3, St1, St2
    a = adjoint
    return [
        (a(G1), Gt2),
        (2 * a(G2), 2 * Gt1),
        (np.zeros((d, d), dtype=complex), np.eye(d, dtype=complex)),
        (2 * a(Gt1), 2 * G2),
        (a(Gt2), G1),
    ]


def _pencils7(F: Sequence, d: int) -> list:
    # symbols F*_i + F_{7-i} z for i = 1..6, then z
    out = [(adjoint(F[i]), F[5 - i]) for i in range(6)]
    out.append((np.zeros((d, d), dtype=complex), np.eye(d, dtype=complex)))
    return out


def pencil_model7(F: Sequence, levels: int) -> Gamma7Tuple:
    """Truncated isometric model ``(M_{F*_i + F_{7-i} z}, M_z)``."""
    F = [as_square(x) for x in F]
    d = F[0].shape[0]
    return Gamma7Tuple([pencil_operator(c0, c1, levels) for c0, c1 in _pencils7(F, d)])


def pencil_model5(G1, G2, Gt1, Gt2, levels: int) -> Gamma5Tuple:
    """Truncated isometric model with symbols
    ``(G1* + Gt2 z, 2G2* + 2Gt1 z, z, 2Gt1* + 2G2 z, Gt2* + G1 z)``."""
    G1, G2, Gt1, Gt2 = (as_square(x) for x in (G1, G2, Gt1, Gt2))
    d = G1.shape[0]
    return Gamma5Tuple([pencil_operator(c0, c1, levels) for c0, c1 in _pencils5(G1, G2, Gt1, Gt2, d)])
