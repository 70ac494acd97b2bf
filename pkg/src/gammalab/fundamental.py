"""Fundamental operators of commuting 7-tuples and 5-tuples.

For a 7-tuple ``(T_1, ..., T_7)`` with ``T_7`` a contraction the fundamental
operators ``F_1..F_6`` live on the defect space of ``T_7`` and solve

    T_i - T_{7-i}^* T_7 = D F_i D,        D = (I - T_7^* T_7)^(1/2).

For a 5-tuple ``(S_1, S_2, S_3, St_1, St_2)`` the four operators
``G_1, G_2, Gt_1, Gt_2`` on the defect space of ``S_3`` solve

    S_1 - St_2^* S_3 = D G_1 D,          St_2 - S_1^* S_3 = D Gt_2 D,
    S_2/2 - St_1^* S_3/2 = D G_2 D,      St_1/2 - S_2^* S_3/2 = D Gt_1 D.

``G_2`` and ``Gt_1`` are stored as the solutions of the halved equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ShapeError
from .kernel import (
    SubspaceBasis,
    adjoint,
    as_square,
    commutator,
    defect_pair,
    numerical_radius,
    operator_norm,
)
from .report import Report

ANCHOR_FUND7 = "fundamental equation T_i - T*_{7-i} T_7 = D F_i D"
ANCHOR_FUND5 = "fundamental equations S_1 - St*_2 S_3 = D G_1 D, S_2/2 - St*_1 S_3/2 = D G_2 D"
ANCHOR_REC7 = "recurrence D T_i = F_i D + F*_{7-i} D T_7"
ANCHOR_REC5 = "recurrence D S_1 = G_1 D + Gt*_2 D S_3"
ANCHOR_COMM7 = "commutativity [F_i,F_j]=0, [F*_i,F_{7-j}]=[F*_j,F_{7-i}]"
ANCHOR_COMM5 = "commutativity of G_1, G_2, Gt_1, Gt_2 and their adjoint brackets"


class _TupleBase:
    names: tuple[str, ...] = ()

    def __init__(self, mats: Sequence):
        if len(mats) != len(self.names):
            raise ShapeError(f"expected {len(self.names)} matrices, got {len(mats)}")
        mats = [as_square(M, name) for M, name in zip(mats, self.names)]
        n = mats[0].shape[0]
        if any(M.shape != (n, n) for M in mats):
            raise ShapeError("all matrices of a tuple must share one square shape")
        self.mats = mats

    @property
    def n(self) -> int:
        return self.mats[0].shape[0]

    @property
    def commutation_residual(self) -> float:
        res = 0.0
        for i, A in enumerate(self.mats):
            for B in self.mats[i + 1:]:
                res = max(res, operator_norm(commutator(A, B)))
        return res

    def as_dict(self) -> dict[str, np.ndarray]:
        return dict(zip(self.names, self.mats))

    def adjoint(self):
        return type(self)([adjoint(M) for M in self.mats])

    def conjugate(self, U: np.ndarray):
        """The tuple ``U X U*`` for a unitary ``U``."""
        return type(self)([U @ M @ adjoint(U) for M in self.mats])

    def __iter__(self):
        return iter(self.mats)

    def __len__(self):
        return len(self.mats)

    def __getitem__(self, key):
        return self.mats[key]

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, commutation_residual={self.commutation_residual:.2e})"


class Gamma7Tuple(_TupleBase):
    """Seven square matrices ``T_1..T_7``; index ``i`` pairs with ``7 - i``.

    ``t.T[i]`` uses one-based indices (``t.T[7]`` is the contraction ``T_7``).
    """

    names = ("T1", "T2", "T3", "T4", "T5", "T6", "T7")
    variant = "gamma7"

    @property
    def T(self) -> dict[int, np.ndarray]:
        return {i + 1: M for i, M in enumerate(self.mats)}


class Gamma5Tuple(_TupleBase):
    """Five square matrices ordered ``(S_1, S_2, S_3, St_1, St_2)``."""

    names = ("S1", "S2", "S3", "St1", "St2")
    variant = "gamma5"

    @property
    def S1(self):
        return self.mats[0]

    @property
    def S2(self):
        return self.mats[1]

    @property
    def S3(self):
        return self.mats[2]

    @property
    def St1(self):
        return self.mats[3]

    @property
    def St2(self):
        return self.mats[4]


def make_tuple(variant: str, mats: Sequence):
    """Build a :class:`Gamma7Tuple` or :class:`Gamma5Tuple` from its variant tag."""
    if variant == "gamma7":
        return Gamma7Tuple(mats)
    if variant == "gamma5":
        return Gamma5Tuple(mats)
    raise ValueError(f"unknown tuple variant {variant!r}")


def _solve_sandwich(D: np.ndarray, basis: SubspaceBasis, R: np.ndarray, method: str) -> tuple[np.ndarray, float]:
    """Solve ``D X D = R`` for ``X`` supported on the defect space.

    Returns the solution in defect coordinates and the ambient residual.
    """
    V = basis.frame
    r = basis.rank
    if r == 0:
        return np.zeros((0, 0), dtype=complex), operator_norm(R)
    Dr = adjoint(V) @ D @ V
    if method == "pinv":
        Dinv = np.linalg.inv(Dr)
        X = Dinv @ (adjoint(V) @ R @ V) @ Dinv
    elif method == "normal":
        # vec(D V X V* D) = (conj(D V) kron (D V)) vec(X) in column-major order
        B = D @ V
        K = np.kron(np.conj(B), B)
        rhs = R.reshape(-1, order="F")
        x = np.linalg.solve(adjoint(K) @ K, adjoint(K) @ rhs)
        X = x.reshape(r, r, order="F")
    else:
        raise ValueError(f"unknown method {method!r}")
    res = operator_norm(D @ V @ X @ adjoint(V) @ D - R)
    return X, res


@dataclass
class FundamentalSet7:
    """Solved fundamental operators of a 7-tuple.

    Attributes:
        F: six ``r x r`` matrices in the coordinates of ``basis``.
        basis: frame of the defect space of ``T_7``.
        D: defect operator of ``T_7`` (ambient).
        residuals: ``||D F_i D - (T_i - T*_{7-i} T_7)||`` for each ``i``.
    """

    F: list
    basis: SubspaceBasis
    D: np.ndarray
    residuals: np.ndarray

    @property
    def rank(self) -> int:
        return self.basis.rank

    def ambient(self, i: int) -> np.ndarray:
        """``F_i`` (one-based) as an ambient operator supported on the defect space."""
        return self.basis.embed(self.F[i - 1])

    def report(self, tol: float) -> Report:
        rep = Report("fundamental operators (7-tuple)")
        for i, r in enumerate(self.residuals, start=1):
            rep.add(f"fundamental eq i={i}", r, tol, ANCHOR_FUND7)
        rep.data["defect_rank"] = self.rank
        return rep


@dataclass
class FundamentalSet5:
    """Solved fundamental operators of a 5-tuple.

    Attributes:
        G1, G2, Gt1, Gt2: ``r x r`` matrices on the defect space of ``S_3``;
            ``G2`` and ``Gt1`` solve the halved equations.
        basis: frame of the defect space of ``S_3``.
        D: defect operator of ``S_3``.
        residuals: residuals of the equations for ``G1, G2, Gt1, Gt2``.
    """

    G1: np.ndarray
    G2: np.ndarray
    Gt1: np.ndarray
    Gt2: np.ndarray
    basis: SubspaceBasis
    D: np.ndarray
    residuals: np.ndarray

    @property
    def rank(self) -> int:
        return self.basis.rank

    def as_list(self) -> list:
        return [self.G1, self.G2, self.Gt1, self.Gt2]

    def report(self, tol: float) -> Report:
        rep = Report("fundamental operators (5-tuple)")
        for name, r in zip(("G1", "G2", "Gt1", "Gt2"), self.residuals):
            rep.add(f"fundamental eq {name}", r, tol, ANCHOR_FUND5)
        rep.data["defect_rank"] = self.rank
        rep.data["norms"] = {
            "G1": operator_norm(self.G1),
            "2G2": 2 * operator_norm(self.G2),
            "2Gt1": 2 * operator_norm(self.Gt1),
            "Gt2": operator_norm(self.Gt2),
        }
        return rep


def solve_fundamental7(t: Gamma7Tuple, tol: float = 1e-8, method: str = "pinv", rank_tol: float | None = None) -> FundamentalSet7:
    """Solve ``T_i - T*_{7-i} T_7 = D F_i D`` on the defect space of ``T_7``.

    Args:
        t: the tuple; ``T_7`` must be a contraction.
        tol: only used for reporting; residuals are always returned.
        method: ``"pinv"`` (inverse of ``D`` on its range) or ``"normal"``
            (normal equations of the vectorized system).
        rank_tol: defect rank cutoff passed to :func:`defect_pair`.

    Returns:
        The fundamental set. With a zero-rank defect the ``F_i`` are empty
        and the residuals are ``||T_i - T*_{7-i} T_7||``.
    """
    T = t.T
    D, basis = defect_pair(T[7], rank_tol)
    F, res = [], []
    for i in range(1, 7):
        R = T[i] - adjoint(T[7 - i]) @ T[7]
        X, r = _solve_sandwich(D, basis, R, method)
        F.append(X)
        res.append(r)
    return FundamentalSet7(F, basis, D, np.array(res))


def verify_recurrence7(t: Gamma7Tuple, f: FundamentalSet7) -> np.ndarray:
    """Residuals ``||D T_i - F_i D - F*_{7-i} D T_7||`` for ``i = 1..6``."""
    T = t.T
    D = f.D
    if D.shape[0] != t.n:
        raise ShapeError("fundamental set does not match the tuple size")
    out = []
    for i in range(1, 7):
        Fi, Fj = f.ambient(i), f.ambient(7 - i)
        out.append(operator_norm(D @ T[i] - Fi @ D - adjoint(Fj) @ D @ T[7]))
    return np.array(out)


def solve_fundamental5(s: Gamma5Tuple, tol: float = 1e-8, method: str = "pinv", rank_tol: float | None = None) -> FundamentalSet5:
    """Solve the four defect equations of a 5-tuple (halving on ``S_2``, ``St_1``)."""
    S1, S2, S3, St1, St2 = s.mats
    D, basis = defect_pair(S3, rank_tol)
    rhs = [
        S1 - adjoint(St2) @ S3,
        S2 / 2 - adjoint(St1) @ S3 / 2,
        St1 / 2 - adjoint(S2) @ S3 / 2,
        St2 - adjoint(S1) @ S3,
    ]
    sols = [_solve_sandwich(D, basis, R, method) for R in rhs]
    G1, G2, Gt1, Gt2 = (x for x, _ in sols)
    return FundamentalSet5(G1, G2, Gt1, Gt2, basis, D, np.array([r for _, r in sols]))


def verify_recurrence5(s: Gamma5Tuple, g: FundamentalSet5) -> np.ndarray:
    """Residuals of the four recurrences

    ``D S_1 = G_1 D + Gt*_2 D S_3``, ``D S_2/2 = G_2 D + Gt*_1 D S_3``,
    ``D St_1/2 = Gt_1 D + G*_2 D S_3`` and ``D St_2 = Gt_2 D + G*_1 D S_3``.
    """
    S1, S2, S3, St1, St2 = s.mats
    D = g.D
    if D.shape[0] != s.n:
        raise ShapeError("fundamental set does not match the tuple size")
    G1, G2, Gt1, Gt2 = (g.basis.embed(X) for X in g.as_list())
    pairs = [
        (D @ S1, G1 @ D + adjoint(Gt2) @ D @ S3),
        (D @ S2 / 2, G2 @ D + adjoint(Gt1) @ D @ S3),
        (D @ St1 / 2, Gt1 @ D + adjoint(G2) @ D @ S3),
        (D @ St2, Gt2 @ D + adjoint(G1) @ D @ S3),
    ]
    return np.array([operator_norm(a - b) for a, b in pairs])


def pencil_numerical_radius(C0, C1, grid_z: int = 64, tol: float = 1e-8) -> float:
    """``max_{|z|=1} w(C0 + C1 z)``.

    The numerical radius is convex in its argument and the pencil is affine
    in ``z``, so the maximum over the closed disc sits on the circle. The
    circle is sampled on ``grid_z`` points and the best arc is refined by
    golden-section search.
    """
    A0, A1 = as_square(C0, "C0"), as_square(C1, "C1")
    if A0.shape != A1.shape:
        raise ShapeError("pencil coefficients must share a shape")
    if A0.size == 0:
        return 0.0

    def w(phi):
        return numerical_radius(A0 + A1 * np.exp(1j * phi), tol=tol)

    step = 2 * np.pi / grid_z
    phis = step * np.arange(grid_z)
    # coarse sweep: one batched eigensolve over the (phi, theta) grid
    thetas = 2 * np.pi * np.arange(360) / 360
    P = A0[None] + A1[None] * np.exp(1j * phis)[:, None, None]
    e = np.exp(1j * thetas)[None, :, None, None]
    H = (e * P[:, None] + np.conj(e) * np.conj(np.swapaxes(P, -1, -2))[:, None]) / 2
    coarse = np.linalg.eigvalsh(H)[..., -1].max(axis=1)
    k = int(np.argmax(coarse))
    best = w(phis[k])
    lip = operator_norm(A1)
    if lip == 0:
        return best
    golden = (np.sqrt(5) - 1) / 2
    a, b = phis[k] - step, phis[k] + step
    c, d = b - golden * (b - a), a + golden * (b - a)
    fc, fd = w(c), w(d)
    while (b - a) * lip > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - golden * (b - a)
            fc = w(c)
        else:
            a, c, fc = c, d, fd
            d = a + golden * (b - a)
            fd = w(d)
    return max(best, fc, fd)


def pencil_conditions7(F: Sequence, form: str = "adjoint-first", grid_z: int = 64, tol: float = 1e-8) -> np.ndarray:
    """Pencil numerical radii for ``i = 1..6``.

    ``form="adjoint-first"`` evaluates ``w(F*_i + F_{7-i} z)`` and
    ``form="direct-first"`` evaluates ``w(F_i + F*_{7-i} z)``. The two are
    not assumed to agree.
    """
    F = [as_square(X) for X in F]
    out = []
    for i in range(6):
        j = 5 - i
        if form == "adjoint-first":
            out.append(pencil_numerical_radius(adjoint(F[i]), F[j], grid_z, tol))
        elif form == "direct-first":
            out.append(pencil_numerical_radius(F[i], adjoint(F[j]), grid_z, tol))
        else:
            raise ValueError(f"unknown form {form!r}")
    return np.array(out)


def pencil_conditions5(G1, G2, Gt1, Gt2, form: str = "adjoint-first", grid_z: int = 64, tol: float = 1e-8) -> np.ndarray:
    """``w(G*_1 + Gt_2 z)`` and ``w(G*_2 + Gt_1 z)`` (or the direct-first forms)."""
    G1, G2, Gt1, Gt2 = (as_square(X) for X in (G1, G2, Gt1, Gt2))
    if form == "adjoint-first":
        pairs = [(adjoint(G1), Gt2), (adjoint(G2), Gt1)]
    elif form == "direct-first":
        pairs = [(G1, adjoint(Gt2)), (G2, adjoint(Gt1))]
    else:
        raise ValueError(f"unknown form {form!r}")
    return np.array([pencil_numerical_radius(a, b, grid_z, tol) for a, b in pairs])


def _check_family(mats):
    mats = [as_square(X) for X in mats]
    if mats and any(X.shape != mats[0].shape for X in mats):
        raise ShapeError("operators must share a shape")
    return mats


def commutativity_conditions7(F: Sequence, tol: float = 1e-8) -> Report:
    """Both commutativity families for six operators ``F_1..F_6``.

    First family ``[F_i, F_j] = 0``; second family
    ``[F*_i, F_{7-j}] = [F*_j, F_{7-i}]`` over all ``i, j``.
    """
    F = _check_family(F)
    if len(F) != 6:
        raise ShapeError("need six operators")
    first = second = 0.0
    for i in range(6):
        for j in range(6):
            if i < j:
                first = max(first, operator_norm(commutator(F[i], F[j])))
            lhs = commutator(adjoint(F[i]), F[5 - j])
            rhs = commutator(adjoint(F[j]), F[5 - i])
            second = max(second, operator_norm(lhs - rhs))
    rep = Report("commutativity conditions (7-tuple)")
    rep.add("[F_i,F_j]=0", first, tol, ANCHOR_COMM7)
    rep.add("[F*_i,F_7-j]=[F*_j,F_7-i]", second, tol, ANCHOR_COMM7)
    return rep


def commutativity_conditions5(G1, G2, Gt1, Gt2, tol: float = 1e-8) -> Report:
    """All brackets required of ``(G_1, G_2, Gt_1, Gt_2)``.

    The first family asks ``G_1`` and ``G_2`` to commute with both ``Gt``
    operators and ``[G_1, G_2] = [Gt_1, Gt_2] = 0``. The second family
    consists of six identities between adjoint brackets.
    """
    G1, G2, Gt1, Gt2 = _check_family((G1, G2, Gt1, Gt2))
    c = commutator
    a = adjoint
    first = max(
        operator_norm(X)
        for X in (c(G1, Gt1), c(G1, Gt2), c(G2, Gt1), c(G2, Gt2), c(G1, G2), c(Gt1, Gt2))
    )
    identities = [
        (c(G1, a(G1)), c(Gt2, a(Gt2))),
        (c(G2, a(G2)), c(Gt1, a(Gt1))),
        (c(G1, a(Gt1)), c(G2, a(Gt2))),
        (c(Gt1, a(G1)), c(Gt2, a(G2))),
        (c(G1, a(G2)), c(Gt1, a(Gt2))),
        (c(a(G1), G2), c(a(Gt1), Gt2)),
    ]
    second = max(operator_norm(lhs - rhs) for lhs, rhs in identities)
    rep = Report("commutativity conditions (5-tuple)")
    rep.add("first family brackets", first, tol, ANCHOR_COMM5)
    rep.add("second family identities", second, tol, ANCHOR_COMM5)
    return rep
