"""Dilations, model forms and unitary parts of 7-tuples and 5-tuples.

Contents:

* Schaffer-type isometric lifts on ``state (+) H^2_N(defect space)``.
* The Douglas embedding ``h -> (sum_n z^n D_{T*} T*^n h, Q h)``.
* The canonical unitary part carried by ``Ran Q`` with
  ``Q^2 = lim T_7^n T_7*^n``.
* The converse construction ``T_i = W* M_{Ft*_i + Ft_{7-i} z} W``.
* Circulant surrogates of the bilateral models and a verifier for claimed
  Wold-type splittings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import NormViolation, NotPure, ResidualTooLarge, ShapeError, TruncationError
from .fundamental import (
    FundamentalSet5,
    FundamentalSet7,
    Gamma5Tuple,
    Gamma7Tuple,
    commutativity_conditions5,
    commutativity_conditions7,
    pencil_conditions5,
    pencil_conditions7,
    solve_fundamental5,
    solve_fundamental7,
    verify_recurrence7,
)
from .hardy import (
    _pencils5,
    _pencils7,
    build_W,
    intertwine_residual5,
    intertwine_residual7,
    pencil_operator,
    theta_series,
    truncated_shift,
)
from .kernel import (
    SubspaceBasis,
    adjoint,
    as_matrix,
    as_square,
    commutator,
    defect_pair,
    joint_diagonalize,
    operator_norm,
    range_basis,
    sot_limit_q,
    spectral_radius,
)
from .mu import GammaPoint, k1_set_check, k_set_check
from .report import Report

A_LIFT = "Schaffer lift: Pi T*_i = V*_i Pi"
A_DIL = "dilation: P_state p(V) Pi = p(T)"
A_ISO7 = "isometry relations: V_7*V_7 = I, V_i = V*_{7-i} V_7"
A_ISO5 = "isometry relations: S_3*S_3 = I, S_1 = St*_2 S_3, S_2 = St*_1 S_3"
A_UNI = "unitary part: N_7 unitary, N_i normal, N*_7 N_i = N*_{7-i}"
A_KSET = "joint spectrum in the distinguished boundary"
A_DOUG = "Douglas model: Pi_D isometric and intertwining"
A_ADM = "converse construction T_i = W* M_{Ft*_i + Ft_{7-i} z} W"
A_WOLD = "Wold model: pencil model (+) unitary part"
A_SM = "corner recovery: T_i - T*_{7-i} T_7 = D F_i D"


# Schaffer dilations ---------------------------------------------------------


@dataclass
class SchafferDilation:
    """Block lower-triangular lift of a tuple.

    Attributes:
        V: lifted matrices on ``state (+) H^2_N(D)``, ordered like the tuple.
        state_dim: dimension of the original space.
        levels: number of Hardy levels ``N``.
        fiber_dim: rank of the defect space.
        pi: inclusion ``h -> (h, 0)``.
        lift_residuals: ``||Pi X*_i - V*_i Pi||`` per matrix.
        boundary_defect: ``||V_c* V_c - I||`` on the top Hardy level, where
            ``V_c`` lifts the contraction.
        interior_defect: same residual with the top level removed.
    """

    V: list
    state_dim: int
    levels: int
    fiber_dim: int
    pi: np.ndarray
    lift_residuals: np.ndarray
    boundary_defect: float
    interior_defect: float
    variant: str = "gamma7"

    def interior_mask(self) -> np.ndarray:
        """Coordinates of the state and all Hardy levels except the top one."""
        m = np.ones(self.state_dim + self.levels * self.fiber_dim, dtype=bool)
        if self.fiber_dim:
            m[self.state_dim + (self.levels - 1) * self.fiber_dim:] = False
        return m

    def corner(self) -> list:
        """Top-left ``state x state`` blocks."""
        n = self.state_dim
        return [X[:n, :n] for X in self.V]


def _lift(top: np.ndarray, left: np.ndarray, hardy: np.ndarray) -> np.ndarray:
    n, h = top.shape[0], hardy.shape[0]
    out = np.zeros((n + h, n + h), dtype=complex)
    out[:n, :n] = top
    out[n:, :n] = left
    out[n:, n:] = hardy
    return out


def _finish(V, T, n, levels, r, contraction_index, variant) -> SchafferDilation:
    pi = np.zeros((n + levels * r, n), dtype=complex)
    pi[:n] = np.eye(n)
    lift = np.array([operator_norm(pi @ adjoint(X) - adjoint(Vx) @ pi) for X, Vx in zip(T, V)])
    Vc = V[contraction_index]
    R = adjoint(Vc) @ Vc - np.eye(n + levels * r)
    top = slice(n + (levels - 1) * r, n + levels * r)
    boundary = operator_norm(R[top, top]) if r else 0.0
    keep = n + (levels - 1) * r
    interior = operator_norm(R[:keep, :keep])
    return SchafferDilation(V, n, levels, r, pi, lift, boundary, interior, variant)


def _left_block(X: np.ndarray, levels: int, r: int) -> np.ndarray:
    # place an r x n block on Hardy level 0
    n = X.shape[1]
    out = np.zeros((levels * r, n), dtype=complex)
    out[:r] = X
    return out


def schaffer7(t: Gamma7Tuple, f: FundamentalSet7, levels: int, tol: float = 1e-8) -> SchafferDilation:
    """Lift ``V_i = [[T_i, 0], [F*_{7-i} D, M_{F_i + F*_{7-i} z}]]`` and
    ``V_7 = [[T_7, 0], [D, M_z]]`` on ``levels`` Hardy levels.

    Raises:
        ResidualTooLarge: if ``f`` does not solve the fundamental equations
            of ``t`` within ``tol``.
    """
    if levels < 2:
        raise ValueError("levels must be at least 2")
    if f.D.shape[0] != t.n:
        raise ShapeError("fundamental set does not match the tuple")
    worst = float(np.max(f.residuals)) if len(f.residuals) else 0.0
    if worst > tol:
        raise ResidualTooLarge(f"fundamental residual {worst:.3e} exceeds {tol:.1e}", worst)
    T = t.T
    n, r = t.n, f.rank
    VD = adjoint(f.basis.frame) @ f.D
    V = []
    for i in range(1, 7):
        Fi, Fj = f.F[i - 1], f.F[6 - i]
        left = _left_block(adjoint(Fj) @ VD, levels, r)
        V.append(_lift(T[i], left, pencil_operator(Fi, adjoint(Fj), levels)))
    V.append(_lift(T[7], _left_block(VD, levels, r), truncated_shift(levels, r)))
    return _finish(V, t.mats, n, levels, r, 6, "gamma7")


def schaffer5(s: Gamma5Tuple, g: FundamentalSet5, levels: int, tol: float = 1e-8) -> SchafferDilation:
    """Five-matrix lift on ``state (+) H^2_N(D_{S_3})``:

    ``W_1 = [[S_1, 0], [Gt*_2 D, M_{G_1 + Gt*_2 z}]]``,
    ``W_2 = [[S_2, 0], [2 Gt*_1 D, M_{2G_2 + 2Gt*_1 z}]]``,
    ``W_3 = [[S_3, 0], [D, M_z]]``,
    ``Wt_1 = [[St_1, 0], [2 G*_2 D, M_{2Gt_1 + 2G*_2 z}]]`` and
    ``Wt_2 = [[St_2, 0], [G*_1 D, M_{Gt_2 + G*_1 z}]]``.
    """
    if levels < 2:
        raise ValueError("levels must be at least 2")
    if g.D.shape[0] != s.n:
        raise ShapeError("fundamental set does not match the tuple")
    worst = float(np.max(g.residuals)) if len(g.residuals) else 0.0
    if worst > tol:
        raise ResidualTooLarge(f"fundamental residual {worst:.3e} exceeds {tol:.1e}", worst)
    S1, S2, S3, St1, St2 = s.mats
    G1, G2, Gt1, Gt2 = g.as_list()
    n, r = s.n, g.rank
    VD = adjoint(g.basis.frame) @ g.D
    a = adjoint
    spec = [
        (S1, a(Gt2), G1, a(Gt2)),
        (S2, 2 * a(Gt1), 2 * G2, 2 * a(Gt1)),
        None,
        (St1, 2 * a(G2), 2 * Gt1, 2 * a(G2)),
        (St2, a(G1), Gt2, a(G1)),
    ]
    V = []
    for item in spec:
        if item is None:
            V.append(_lift(S3, _left_block(VD, levels, r), truncated_shift(levels, r)))
            continue
        top, lcoef, c0, c1 = item
        V.append(_lift(top, _left_block(lcoef @ VD, levels, r), pencil_operator(c0, c1, levels)))
    return _finish(V, s.mats, n, levels, r, 2, "gamma5")


def _random_monomials(k: int, max_deg: int, samples: int, rng, contraction: int) -> list:
    out = [np.zeros(k, dtype=int)]
    e = np.zeros(k, dtype=int)
    e[contraction] = max_deg
    out.append(e)
    for _ in range(samples):
        deg = int(rng.integers(0, max_deg + 1))
        e = np.bincount(rng.integers(0, k, size=deg), minlength=k)
        out.append(e)
    return out


def dilation_identity_check(d: SchafferDilation, t, max_deg: int, samples: int = 64, seed: int = 0) -> float:
    """Largest ``||P_state p(V) Pi - p(T)||`` over random monomials.

    Monomials of total degree at most ``max_deg`` are drawn at random; the
    constant monomial and the pure power of the contraction are always
    included.

    Raises:
        TruncationError: if ``max_deg > levels - 2``.
    """
    if max_deg > d.levels - 2:
        raise TruncationError(f"degree {max_deg} exceeds levels - 2 = {d.levels - 2}")
    mats = list(t.mats if hasattr(t, "mats") else t)
    rng = np.random.default_rng(seed)
    n = d.state_dim
    worst = 0.0
    contraction = 6 if len(mats) == 7 else 2
    for e in _random_monomials(len(mats), max_deg, samples, rng, contraction):
        PV = np.eye(d.pi.shape[0], dtype=complex)
        PT = np.eye(n, dtype=complex)
        for j, power in enumerate(e):
            if power:
                PV = PV @ np.linalg.matrix_power(d.V[j], int(power))
                PT = PT @ np.linalg.matrix_power(mats[j], int(power))
        worst = max(worst, operator_norm(adjoint(d.pi) @ PV @ d.pi - PT))
    return worst


def corner_recovery7(d: SchafferDilation, f: FundamentalSet7) -> float:
    """Re-solve the fundamental equations on the corner of a dilation and
    return the distance to the input operators."""
    corner = Gamma7Tuple(d.corner())
    g = solve_fundamental7(corner)
    if g.rank != f.rank:
        return float("inf")
    diff = [operator_norm(g.ambient(i) - f.ambient(i)) for i in range(1, 7)]
    return max(diff + [float(np.max(g.residuals))]) if diff else float(np.max(g.residuals, initial=0.0))


def corner_recovery5(d: SchafferDilation, g: FundamentalSet5) -> float:
    corner = Gamma5Tuple(d.corner())
    h = solve_fundamental5(corner)
    if h.rank != g.rank:
        return float("inf")
    diff = [operator_norm(h.basis.embed(x) - g.basis.embed(y)) for x, y in zip(h.as_list(), g.as_list())]
    return max(diff + [float(np.max(h.residuals))])


# isometry and unitary checks --------------------------------------------


def _masked(R: np.ndarray, mask) -> np.ndarray:
    if mask is None:
        return R
    mask = np.asarray(mask, dtype=bool)
    return R[np.ix_(mask, mask)]


def _commutation(mats) -> float:
    res = 0.0
    for i, A in enumerate(mats):
        for B in mats[i + 1:]:
            res = max(res, operator_norm(commutator(A, B)))
    return res


def gamma_isometry_check7(v, tol: float = 1e-8, mask=None) -> Report:
    """Isometry relations of a 7-tuple.

    Args:
        v: tuple or list of seven matrices.
        tol: pass threshold for every residual.
        mask: optional boolean vector of coordinates on which the isometry
            relations are certified (for truncated models, all but the top
            Hardy level).
    """
    V = list(v.mats if hasattr(v, "mats") else v)
    n = V[0].shape[0]
    rep = Report("isometry check (7-tuple)")
    rep.add("V7*V7=I", operator_norm(_masked(adjoint(V[6]) @ V[6] - np.eye(n), mask)), tol, A_ISO7)
    rel = max(operator_norm(_masked(V[i] - adjoint(V[5 - i]) @ V[6], mask)) for i in range(6))
    rep.add("V_i=V*_7-i V7", rel, tol, A_ISO7)
    rep.add("commutation", _commutation(V), tol, A_ISO7)
    rep.add("||V_i||<=1", max(0.0, max(operator_norm(X) for X in V) - 1), tol, A_ISO7)
    return rep


def gamma_isometry_check5(v, tol: float = 1e-8, mask=None) -> Report:
    """Isometry relations of a 5-tuple with the norm gates
    ``||S_1||, ||St_2|| <= 1`` and ``||S_2||, ||St_1|| <= 2``."""
    S1, S2, S3, St1, St2 = list(v.mats if hasattr(v, "mats") else v)
    n = S1.shape[0]
    a = adjoint
    rep = Report("isometry check (5-tuple)")
    rep.add("S3*S3=I", operator_norm(_masked(a(S3) @ S3 - np.eye(n), mask)), tol, A_ISO5)
    rep.add("S1=St2*S3", operator_norm(_masked(S1 - a(St2) @ S3, mask)), tol, A_ISO5)
    rep.add("S2=St1*S3", operator_norm(_masked(S2 - a(St1) @ S3, mask)), tol, A_ISO5)
    rep.add("St1=S2*S3", operator_norm(_masked(St1 - a(S2) @ S3, mask)), tol, A_ISO5)
    rep.add("St2=S1*S3", operator_norm(_masked(St2 - a(S1) @ S3, mask)), tol, A_ISO5)
    rep.add("commutation", _commutation([S1, S2, S3, St1, St2]), tol, A_ISO5)
    gate = max(
        operator_norm(S1) - 1, operator_norm(St2) - 1, operator_norm(S2) - 2, operator_norm(St1) - 2, operator_norm(S3) - 1
    )
    rep.add("norm gates", max(0.0, gate), tol, A_ISO5)
    return rep


def gamma_unitary_check7(N: Sequence, tol: float = 1e-8, seed: int = 0) -> Report:
    """Unitary-part relations and the boundary test on the joint spectrum."""
    N = [as_square(X) for X in N]
    rep = Report("unitary check (7-tuple)")
    m = N[0].shape[0]
    if m == 0:
        rep.notes.append("empty unitary part")
        return rep
    I = np.eye(m)
    N7 = N[6]
    rep.add("N7 unitary", max(operator_norm(adjoint(N7) @ N7 - I), operator_norm(N7 @ adjoint(N7) - I)), tol, A_UNI)
    rep.add("N_i normal", max(operator_norm(X @ adjoint(X) - adjoint(X) @ X) for X in N), tol, A_UNI)
    rep.add("N7*N_i=N*_7-i", max(operator_norm(adjoint(N7) @ N[i] - adjoint(N[5 - i])) for i in range(6)), tol, A_UNI)
    rep.add("commutation", _commutation(N), tol, A_UNI)
    if rep.passed:
        _, spectra = joint_diagonalize(N, tol=max(tol, 1e-10), seed=seed)
        worst = 0.0
        for k in range(m):
            _, res = k_set_check(GammaPoint("E3311", spectra[:, k]), tol)
            worst = max(worst, max(res.values()))
        rep.add("joint spectrum in K", worst, tol, A_KSET)
        rep.data["joint_spectrum"] = spectra
    else:
        rep.notes.append("joint spectrum skipped: tuple is not a commuting normal family")
    return rep


def gamma_unitary_check5(N: Sequence, tol: float = 1e-8, seed: int = 0) -> Report:
    """5-tuple analogue of :func:`gamma_unitary_check7` with ``N_3`` unitary,
    ``N_1 = Nt*_2 N_3``, ``N_2 = Nt*_1 N_3`` and the ``K_1`` test."""
    N = [as_square(X) for X in N]
    rep = Report("unitary check (5-tuple)")
    m = N[0].shape[0]
    if m == 0:
        rep.notes.append("empty unitary part")
        return rep
    I = np.eye(m)
    N1, N2, N3, Nt1, Nt2 = N
    a = adjoint
    rep.add("N3 unitary", max(operator_norm(a(N3) @ N3 - I), operator_norm(N3 @ a(N3) - I)), tol, A_UNI)
    rep.add("N_i normal", max(operator_norm(X @ a(X) - a(X) @ X) for X in N), tol, A_UNI)
    rel = max(operator_norm(N1 - a(Nt2) @ N3), operator_norm(N2 - a(Nt1) @ N3))
    rep.add("N1=Nt2*N3, N2=Nt1*N3", rel, tol, A_UNI)
    rep.add("commutation", _commutation(N), tol, A_UNI)
    if rep.passed:
        _, spectra = joint_diagonalize(N, tol=max(tol, 1e-10), seed=seed)
        worst = 0.0
        for k in range(m):
            _, res = k1_set_check(GammaPoint("E3212", spectra[:, k]), tol)
            worst = max(worst, max(res.values()))
        rep.add("joint spectrum in K1", worst, tol, A_KSET)
        rep.data["joint_spectrum"] = spectra
    else:
        rep.notes.append("joint spectrum skipped: tuple is not a commuting normal family")
    return rep


# canonical unitary part -------------------------------------------------


@dataclass
class CanonicalUnitary:
    """Unitary part of a tuple carried by ``Ran Q``.

    Attributes:
        range_basis: frame of ``Ran Q``.
        N: matrices on ``Ran Q`` in the coordinates of ``range_basis``.
        Q: the limit operator.
        report: relation residuals.
        spectra: joint eigenvalues (one column per eigenvector), if computed.
    """

    range_basis: SubspaceBasis
    N: list
    Q: np.ndarray
    report: Report
    spectra: np.ndarray | None = None

    @property
    def rank(self) -> int:
        return self.range_basis.rank

    def ambient(self, i: int) -> np.ndarray:
        """The ``i``-th matrix (zero-based) as an operator on the original space."""
        return self.range_basis.embed(self.N[i])


def _canonical(mats: Sequence[np.ndarray], contraction: np.ndarray, tol: float, rank_tol: float):
    Q = sot_limit_q(contraction)
    basis, _ = range_basis(Q, rank_tol)
    R = basis.frame
    m = basis.rank
    N, welldef = [], 0.0
    if m:
        Qr = adjoint(R) @ Q @ R
        Qr_inv = np.linalg.inv(Qr)
        for X in mats:
            Nstar = adjoint(R) @ Q @ adjoint(X) @ R @ Qr_inv
            welldef = max(welldef, operator_norm(R @ Nstar @ adjoint(R) @ Q - Q @ adjoint(X)))
            N.append(adjoint(Nstar))
    else:
        N = [np.zeros((0, 0), dtype=complex) for _ in mats]
    return Q, basis, N, welldef


def canonical_unitary7(t: Gamma7Tuple, tol: float = 1e-8, rank_tol: float = 1e-6, seed: int = 0) -> CanonicalUnitary:
    """Unitary 7-tuple ``N`` on ``Ran Q`` defined by ``N*_i Q h = Q T*_i h``.

    ``Q`` is the square root of ``lim T_7^n T_7*^n``. In finite dimensions
    the isometry ``N*_7`` on ``Ran Q`` is already unitary, so no further
    dilation is needed.
    """
    Q, basis, N, welldef = _canonical(t.mats, t.T[7], tol, rank_tol)
    rep = Report("canonical unitary (7-tuple)")
    rep.add("N*Q=QT* well defined", welldef, tol, A_UNI)
    rep.notes.append("finite rank Q: the isometry N7* is unitary, minimal unitary dilation is the identity step")
    rep.data["rank"] = basis.rank
    uni = gamma_unitary_check7(N, tol, seed)
    rep.extend(uni)
    return CanonicalUnitary(basis, N, Q, rep, uni.data.get("joint_spectrum"))


def canonical_unitary5(s: Gamma5Tuple, tol: float = 1e-8, rank_tol: float = 1e-6, seed: int = 0) -> CanonicalUnitary:
    """5-tuple analogue of :func:`canonical_unitary7` built from ``S_3``."""
    Q, basis, N, welldef = _canonical(s.mats, s.S3, tol, rank_tol)
    rep = Report("canonical unitary (5-tuple)")
    rep.add("N*Q=QS* well defined", welldef, tol, A_UNI)
    rep.notes.append("finite rank Q: the isometry N3* is unitary, minimal unitary dilation is the identity step")
    rep.data["rank"] = basis.rank
    uni = gamma_unitary_check5(N, tol, seed)
    rep.extend(uni)
    return CanonicalUnitary(basis, N, Q, rep, uni.data.get("joint_spectrum"))


def spectra_distance(a: np.ndarray | None, b: np.ndarray | None) -> float:
    """Bottleneck-free multiset distance: best matching of joint eigenvalue
    columns, then the largest matched gap."""
    a = np.zeros((0, 0)) if a is None else a
    b = np.zeros((0, 0)) if b is None else b
    if a.shape[1] != b.shape[1]:
        return float("inf")
    if a.shape[1] == 0:
        return 0.0
    cost = np.max(np.abs(a[:, :, None] - b[:, None, :]), axis=0)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def unitary_equivalence_invariance(t, U: np.ndarray, tol: float = 1e-8) -> tuple[bool, float]:
    """Compare the canonical unitary parts of ``t`` and ``U t U*``.

    Returns:
        ``(equal, distance)`` where ``distance`` is the multiset distance
        between the two joint spectra.
    """
    canon = canonical_unitary7 if isinstance(t, Gamma7Tuple) else canonical_unitary5
    a = canon(t, tol)
    b = canon(t.conjugate(U), tol)
    dist = spectra_distance(a.spectra, b.spectra) if a.rank == b.rank else float("inf")
    return dist <= tol, dist


# Douglas embedding ------------------------------------------------------


@dataclass
class DouglasEmbedding:
    """``Pi_D = [O; Q]`` with ``O`` the stacked ``D_{T*} T*^n`` rows.

    Attributes:
        O: observability-type rows (``levels`` blocks).
        Q: the limit operator.
        pi: the stacked embedding.
        isometry_residual: ``||Pi_D* Pi_D - I||``.
        report: intertwining residuals.
    """

    O: np.ndarray
    Q: np.ndarray
    pi: np.ndarray
    isometry_residual: float
    report: Report


def douglas_embedding(t: Gamma7Tuple, levels: int, tol: float = 1e-8) -> DouglasEmbedding:
    """Assemble and verify the Douglas embedding of a 7-tuple.

    Checks ``O T*_i = M*_{Ft*_i + Ft_{7-i} z} O`` away from the top level,
    ``Q T*_i = N*_i Q`` with ``N`` the canonical unitary part, and the
    recurrences of the adjoint tuple
    ``D_{T*} T*_i = Ft_i D_{T*} + Ft*_{7-i} D_{T*} T*_7``.
    """
    T = t.T
    T7 = T[7]
    O = build_W(T7, levels)
    Q = sot_limit_q(T7)
    pi = np.vstack([O, Q])
    n = t.n
    iso = operator_norm(adjoint(pi) @ pi - np.eye(n))
    rep = Report("Douglas embedding (7-tuple)")
    # pure-part tail: T*^N restricted to ker Q
    kerQ = scipy.linalg.null_space(Q, rcond=1e-6) if n else np.zeros((0, 0))
    tail = operator_norm(np.linalg.matrix_power(adjoint(T7), levels) @ kerQ) ** 2 if kerQ.size else 0.0
    rep.add("Pi_D isometry", iso, max(tol, 2 * tail + tol), A_DOUG)
    rep.data["isometry_residual"] = iso
    rep.data["pure_tail"] = tail
    adj = t.adjoint()
    ft = solve_fundamental7(adj)
    rep.add("adjoint fundamental eqs", float(np.max(ft.residuals)), tol, A_DOUG)
    rep.add("adjoint recurrences", float(np.max(verify_recurrence7(adj, ft))), tol, A_DOUG)
    r = ft.rank
    if r:
        keep = (levels - 1) * r
        worst = 0.0
        for i in range(1, 7):
            M = pencil_operator(adjoint(ft.F[i - 1]), ft.F[6 - i], levels)
            R = O @ adjoint(T[i]) - adjoint(M) @ O
            worst = max(worst, operator_norm(R[:keep]))
        rep.add("O-row intertwining", worst, tol, A_DOUG)
    cu = canonical_unitary7(t, tol)
    if cu.rank:
        worst = max(operator_norm(Q @ adjoint(T[i]) - adjoint(cu.ambient(i - 1)) @ Q) for i in range(1, 8))
        rep.add("Q-row intertwining", worst, tol, A_DOUG)
    rep.data["unitary_rank"] = cu.rank
    return DouglasEmbedding(O, Q, pi, iso, rep)


# converse construction --------------------------------------------------


@dataclass
class AdmissibleResult:
    """Output of the converse construction.

    Attributes:
        tuple: constructed tuple on the state space of ``T_7``.
        fundamental: fundamental set re-solved on the constructed tuple.
        report: hypothesis and recovery residuals.
    """

    tuple: object
    fundamental: object
    report: Report


def _tail(T7: np.ndarray, levels: int) -> float:
    return operator_norm(np.linalg.matrix_power(T7, max(levels - 1, 0)))


def admissible_construct7(T7, Ft: Sequence, levels: int, tol: float = 1e-8, F: Sequence | None = None) -> AdmissibleResult:
    """Build ``T_i = W* M_{Ft*_i + Ft_{7-i} z} W`` for a pure ``T_7``.

    Args:
        T7: contraction with spectral radius below one.
        Ft: six operators on the defect space of ``T_7*`` (in the frame of
            :func:`defect_pair` applied to ``T_7*``).
        levels: number of Hardy levels for ``W``.
        tol: residual threshold (truncation tails are added on top).
        F: optional partner operators on the defect space of ``T_7``; when
            given, the intertwining with the characteristic function is
            checked and the re-solved fundamental set is compared with ``F``.

    Raises:
        NotPure: if ``rho(T_7) >= 1``.
    """
    M7 = as_square(T7, "T7")
    if spectral_radius(M7) >= 1:
        raise NotPure("T7 must have spectral radius below one")
    Ft = [as_matrix(x) for x in Ft]
    Ds, bout = defect_pair(adjoint(M7))
    r = bout.rank
    if any(x.shape != (r, r) for x in Ft):
        raise ShapeError(f"Ft must be {r}x{r} operators on the defect space of T7*")
    rep = Report("converse construction (7-tuple)")
    if r:
        rep.extend(commutativity_conditions7(Ft, tol))
        w = pencil_conditions7(Ft, "adjoint-first")
        rep.add("w(Ft*_i+Ft_7-i z)<=1", max(0.0, float(w.max()) - 1), tol, A_ADM)
    W = build_W(M7, levels)
    mats = []
    for i in range(6):
        A = pencil_operator(adjoint(Ft[i]), Ft[5 - i], levels)
        mats.append(adjoint(W) @ A @ W)
    mats.append(M7)
    t = Gamma7Tuple(mats)
    scale = 1 + max([operator_norm(x) for x in Ft] + [0.0])
    slack = 4 * scale * _tail(M7, levels)
    rep.add("commutation", t.commutation_residual, tol + slack, A_ADM)
    T = t.T
    worst = 0.0
    for i in range(1, 7):
        R = adjoint(T[i]) - T[7 - i] @ adjoint(M7) - Ds @ bout.embed(Ft[i - 1]) @ Ds
        worst = max(worst, operator_norm(R))
    rep.add("adjoint fundamental recovery", worst, tol + slack, A_ADM)
    fund = solve_fundamental7(t)
    rep.add("fundamental eqs of T", float(np.max(fund.residuals)), tol + slack, A_ADM)
    rep.data["tail"] = slack
    if F is not None:
        F = [as_matrix(x) for x in F]
        th = theta_series(M7, 8)
        rep.add("Theta intertwining", float(intertwine_residual7(Ft, F, th, 8).max()), tol, A_ADM)
        if fund.rank == len(F[0]):
            diff = max(operator_norm(fund.ambient(i) - fund.basis.embed(F[i - 1])) for i in range(1, 7))
        else:
            diff = float("inf")
        rep.add("re-solved F matches partner", diff, max(1e-6, tol), A_ADM)
    return AdmissibleResult(t, fund, rep)


def admissible_construct5(S3, Ghat: Sequence, levels: int, tol: float = 1e-8, G: Sequence | None = None) -> AdmissibleResult:
    """5-tuple converse construction with pencils
    ``Gh1* + Ght2 z``, ``2Gh2* + 2Ght1 z``, ``2Ght1* + 2Gh2 z`` and
    ``Ght2* + Gh1 z`` compressed by ``W``."""
    M3 = as_square(S3, "S3")
    if spectral_radius(M3) >= 1:
        raise NotPure("S3 must have spectral radius below one")
    h1, h2, ht1, ht2 = (as_matrix(x) for x in Ghat)
    Ds, bout = defect_pair(adjoint(M3))
    r = bout.rank
    if any(x.shape != (r, r) for x in (h1, h2, ht1, ht2)):
        raise ShapeError(f"Ghat must be {r}x{r} operators on the defect space of S3*")
    rep = Report("converse construction (5-tuple)")
    if r:
        rep.extend(commutativity_conditions5(h1, h2, ht1, ht2, tol))
        w = pencil_conditions5(h1, h2, ht1, ht2, "adjoint-first")
        rep.add("w(Gh*+Ght z)<=1", max(0.0, float(w.max()) - 1), tol, A_ADM)
    W = build_W(M3, levels)
    mats = []
    for k, (c0, c1) in enumerate(_pencils5(h1, h2, ht1, ht2, r)):
        mats.append(M3 if k == 2 else adjoint(W) @ pencil_operator(c0, c1, levels) @ W)
    s = Gamma5Tuple(mats)
    scale = 1 + 2 * max(operator_norm(x) for x in (h1, h2, ht1, ht2))
    slack = 4 * scale * _tail(M3, levels)
    rep.add("commutation", s.commutation_residual, tol + slack, A_ADM)
    S1, S2, _, St1, St2 = s.mats
    a = adjoint
    emb = bout.embed
    eqs = [
        (a(S1) - St2 @ a(M3), h1),
        (a(S2) / 2 - St1 @ a(M3) / 2, h2),
        (a(St1) / 2 - S2 @ a(M3) / 2, ht1),
        (a(St2) - S1 @ a(M3), ht2),
    ]
    worst = max(operator_norm(R - Ds @ emb(X) @ Ds) for R, X in eqs)
    rep.add("adjoint fundamental recovery", worst, tol + slack, A_ADM)
    fund = solve_fundamental5(s)
    rep.add("fundamental eqs of S", float(np.max(fund.residuals)), tol + slack, A_ADM)
    rep.data["tail"] = slack
    if G is not None:
        G = [as_matrix(x) for x in G]
        th = theta_series(M3, 8)
        rep.add("Theta intertwining", float(intertwine_residual5((h1, h2, ht1, ht2), G, th, 8).max()), tol, A_ADM)
        if fund.rank == len(G[0]):
            diff = max(operator_norm(fund.basis.embed(x) - fund.basis.embed(y)) for x, y in zip(fund.as_list(), G))
        else:
            diff = float("inf")
        rep.add("re-solved G matches partner", diff, max(1e-6, tol), A_ADM)
    return AdmissibleResult(s, fund, rep)


# circulant unitary models -----------------------------------------------


def _dft(M: int) -> np.ndarray:
    k = np.arange(M)
    return np.exp(2j * np.pi * np.outer(k, k) / M) / np.sqrt(M)


def circulant_gamma_unitary(symbols: Sequence, modes: int, variant: str = "gamma7", form: str = "diagonal", tol: float = 1e-12):
    """Finite unitary surrogate of a bilateral pencil model.

    For ``variant="gamma7"`` the symbols are ``Ft_1..Ft_6`` and
    ``N_i = (+)_k (Ft*_i + Ft_{7-i} w_k)``, ``N_7 = (+)_k w_k I`` over the
    ``modes``-th roots of unity ``w_k``. For ``variant="gamma5"`` the symbols
    are ``(G1, G2, Gt1, Gt2)`` and the pencils follow the 5-tuple model.
    ``form="circulant"`` conjugates by the block DFT, giving block circulant
    matrices.

    Raises:
        NormViolation: if a pencil exceeds its norm bound at some ``w_k``.
    """
    if modes < 1:
        raise ValueError("modes must be at least 1")
    syms = [as_square(x) for x in symbols]
    d = syms[0].shape[0]
    omegas = np.exp(2j * np.pi * np.arange(modes) / modes)
    if variant == "gamma7":
        if len(syms) != 6:
            raise ShapeError("gamma7 needs six symbols")
        pencils = _pencils7(syms, d)
        bounds = [1.0] * 6 + [1.0]
    elif variant == "gamma5":
        if len(syms) != 4:
            raise ShapeError("gamma5 needs four symbols")
        pencils = _pencils5(*syms, d)
        bounds = [1.0, 2.0, 1.0, 2.0, 1.0]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    mats = []
    for (c0, c1), bound in zip(pencils, bounds):
        blocks = [c0 + c1 * w for w in omegas]
        worst = max(operator_norm(b) for b in blocks)
        if worst > bound + tol:
            raise NormViolation(f"pencil norm {worst:.6g} exceeds {bound}")
        mats.append(scipy.linalg.block_diag(*blocks).astype(complex))
    if form == "circulant":
        P = np.kron(_dft(modes), np.eye(d))
        mats = [P @ X @ adjoint(P) for X in mats]
    elif form != "diagonal":
        raise ValueError(f"unknown form {form!r}")
    return Gamma7Tuple(mats) if variant == "gamma7" else Gamma5Tuple(mats)


def pencil_sup_norm(C0, C1, grid: int = 256) -> float:
    """``max_k ||C0 + C1 w_k||`` over ``grid`` points of the circle."""
    omegas = np.exp(2j * np.pi * np.arange(grid) / grid)
    return max(operator_norm(C0 + C1 * w) for w in omegas)


# Wold-type splittings ---------------------------------------------------


def wold_verify(v: Gamma7Tuple, split: int, fiber_dim: int, tol: float = 1e-8, seed: int = 0) -> Report:
    """Certify a claimed splitting ``v = pencil model (+) unitary tuple``.

    Args:
        v: tuple whose first ``split`` coordinates carry a truncated pencil
            model ``(M_{F*_i + F_{7-i} z}, M_z)`` with fiber ``fiber_dim``
            and whose remaining coordinates carry a unitary tuple.
        split: dimension of the pure block.
        fiber_dim: fiber dimension of the pencil model.
        tol: threshold for every residual.

    Returns:
        A report with cross-block residuals (the worst one located in
        ``report.data["worst_cross"]``), pencil structure checks on the top
        block and unitary checks on the bottom block.
    """
    V = v.mats
    n = v.n
    if not 0 <= split <= n:
        raise ShapeError("split must lie between 0 and the tuple size")
    rep = Report("Wold model verification (7-tuple)")
    worst_cross = (None, None, 0.0)
    for i, X in enumerate(V, start=1):
        up = operator_norm(X[:split, split:]) if split and split < n else 0.0
        lo = operator_norm(X[split:, :split]) if split and split < n else 0.0
        rep.add(f"cross blocks T{i}", max(up, lo), tol, A_WOLD)
        for where, val in (("upper-right", up), ("lower-left", lo)):
            if val > worst_cross[2]:
                worst_cross = (f"T{i}", where, val)
    rep.data["worst_cross"] = worst_cross
    if split:
        if fiber_dim < 1 or split % fiber_dim:
            raise ShapeError("split must be a multiple of fiber_dim")
        levels = split // fiber_dim
        top = [X[:split, :split] for X in V]
        d = fiber_dim
        C0 = [X[:d, :d] for X in top]
        C1 = [X[d:2 * d, :d] if levels > 1 else np.zeros((d, d), dtype=complex) for X in top]
        struct = max(operator_norm(X - pencil_operator(a, b, levels)) for X, a, b in zip(top, C0, C1))
        rep.add("pencil structure", struct, tol, A_WOLD)
        shift = max(operator_norm(C0[6]), operator_norm(C1[6] - np.eye(d)))
        rep.add("T7 block is the shift", shift, tol, A_WOLD)
        Fs = [adjoint(c) for c in C0[:6]]
        sym = max(operator_norm(C1[i] - Fs[5 - i]) for i in range(6)) if levels > 1 else 0.0
        rep.add("symbols F*_i + F_7-i z", sym, tol, A_WOLD)
        rep.extend(commutativity_conditions7(Fs, tol))
        norms = max(pencil_sup_norm(C0[i], C1[i]) for i in range(6))
        rep.add("pencil sup norms <= 1", max(0.0, norms - 1), tol, A_WOLD)
        mask = np.ones(split, dtype=bool)
        mask[(levels - 1) * d:] = False
        rep.extend(gamma_isometry_check7(top, tol, mask), prefix="pure: ")
    if split < n:
        bottom = [X[split:, split:] for X in V]
        rep.extend(gamma_unitary_check7(bottom, tol, seed), prefix="unitary: ")
    return rep
