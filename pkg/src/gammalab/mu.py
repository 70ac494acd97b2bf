"""Structured singular value bounds and the symmetrization maps.

For a block structure ``E(n; s; r_1, ..., r_s)`` of matrices
``diag(z_1 I_{r_1}, ..., z_s I_{r_s})`` this module brackets

    mu_E(A) = 1 / inf{ ||X|| : X in E, det(I - A X) = 0 }

between a phase-search lower bound ``max rho(A Phi)`` over unimodular
structured ``Phi`` and a similarity-scaling upper bound
``inf ||D A D^{-1}||`` over invertible ``D`` commuting with ``E``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
from scipy.special import logsumexp

from .errors import ShapeError
from .kernel import as_square, operator_norm

VARIANTS = ("E3311", "E3212", "E2211")


@dataclass(frozen=True)
class BlockStructure:
    """Block sizes of a scalar block-diagonal uncertainty structure.

    Attributes:
        n: ambient matrix size.
        block_sizes: sizes ``r_1..r_s`` of the repeated scalar blocks.
    """

    n: int
    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(r) for r in self.block_sizes)
        object.__setattr__(self, "block_sizes", sizes)
        if len(sizes) < 1 or any(r < 1 for r in sizes) or sum(sizes) != self.n:
            raise ValueError(f"invalid block structure n={self.n}, sizes={sizes}")

    @property
    def s(self) -> int:
        return len(self.block_sizes)

    @classmethod
    def parse(cls, text: str) -> "BlockStructure":
        """Parse ``"n;s;r1,..,rs"``, for example ``"3;2;1,2"``."""
        try:
            n_txt, s_txt, r_txt = text.split(";")
            sizes = tuple(int(v) for v in r_txt.split(","))
            n, s = int(n_txt), int(s_txt)
        except ValueError as exc:
            raise ValueError(f"cannot parse structure {text!r}") from exc
        if len(sizes) != s:
            raise ValueError(f"structure {text!r} lists {len(sizes)} blocks, expected {s}")
        return cls(n, sizes)

    def expand(self, values: np.ndarray) -> np.ndarray:
        """Repeat per-block values along the last axis to length ``n``."""
        return np.repeat(values, self.block_sizes, axis=-1)

    def offsets(self) -> list[int]:
        return list(np.cumsum((0,) + self.block_sizes))


E3311 = BlockStructure(3, (1, 1, 1))
E3212 = BlockStructure(3, (1, 2))
E2211 = BlockStructure(2, (1, 1))


@dataclass
class MuBounds:
    """Certified bracket for ``mu_E(A)``.

    Attributes:
        lower: value of ``rho(A Phi)`` at ``Phi = diag(phase_witness)``.
        upper: value of ``||D A D^{-1}||`` at the returned scaling.
        phase_witness: one unimodular scalar per block; ``X = Phi / lower``
            makes ``I - A X`` singular.
        scaling_witness: one invertible block per structure block
            (positive scalars for blocks of size one).
    """

    lower: float
    upper: float
    phase_witness: np.ndarray
    scaling_witness: list = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def relative_gap(self) -> float:
        return self.gap / max(self.upper, 1e-12)


def _check(A, st: BlockStructure) -> np.ndarray:
    M = as_square(A, "A")
    if M.shape[0] != st.n:
        raise ShapeError(f"A is {M.shape[0]}x{M.shape[0]} but structure has n={st.n}")
    return M


def _cubic_roots(b, c, d):
    # roots of x^3 + b x^2 + c x + d, vectorized, with two Newton polishes
    b2 = b * b
    p = c - b2 / 3
    q = 2 * b2 * b / 27 - b * c / 3 + d
    disc = np.sqrt(q * q / 4 + p * p * p / 27)
    u1, u2 = -q / 2 + disc, -q / 2 - disc
    u = np.where(np.abs(u1) >= np.abs(u2), u1, u2)
    C = np.cbrt(np.abs(u)) * np.exp(1j * np.angle(u) / 3)
    safe = np.abs(C) > 0
    Cs = np.where(safe, C, 1)
    omega = np.exp(2j * np.pi / 3)
    roots = []
    for k in range(3):
        w = omega**k * Cs
        t = np.where(safe, w - p / (3 * w), 0)
        roots.append(t - b / 3)
    x = np.stack(roots, axis=-1)
    bb, cc, dd = b[..., None], c[..., None], d[..., None]
    for _ in range(2):
        f = ((x + bb) * x + cc) * x + dd
        fp = (3 * x + 2 * bb) * x + cc
        ok = np.abs(fp) > 1e-10
        x = np.where(ok, x - f / np.where(ok, fp, 1), x)
    return x


def _rho_batch(M: np.ndarray) -> np.ndarray:
    """Spectral radii of a batch of small square matrices."""
    n = M.shape[-1]
    if n == 1:
        return np.abs(M[..., 0, 0])
    if n == 2:
        tr = M[..., 0, 0] + M[..., 1, 1]
        det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
        disc = np.sqrt(tr * tr - 4 * det)
        return np.maximum(np.abs(tr + disc), np.abs(tr - disc)) / 2
    if n == 3:
        tr = M[..., 0, 0] + M[..., 1, 1] + M[..., 2, 2]
        m2 = (
            M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
            + M[..., 0, 0] * M[..., 2, 2] - M[..., 0, 2] * M[..., 2, 0]
            + M[..., 1, 1] * M[..., 2, 2] - M[..., 1, 2] * M[..., 2, 1]
        )
        det = np.linalg.det(M)
        return np.abs(_cubic_roots(-tr, m2, -det)).max(axis=-1)
    return np.abs(np.linalg.eigvals(M)).max(axis=-1)


def _rho_at(A: np.ndarray, st: BlockStructure, free_phases: np.ndarray) -> tuple[float, complex]:
    phases = np.exp(1j * np.concatenate([[0.0], free_phases]))
    eig = np.linalg.eigvals(A * st.expand(phases)[None, :])
    k = int(np.argmax(np.abs(eig)))
    return float(abs(eig[k])), complex(eig[k])


def _principal_minor_sums(A: np.ndarray, diag_phases: np.ndarray) -> list[np.ndarray]:
    """Characteristic coefficients ``e_k`` of ``A Phi`` for a batch of phase vectors.

    ``e_k`` is the sum over index sets ``S`` of size ``k`` of the principal
    minor ``det A[S, S]`` times the product of the phases in ``S``.
    """
    n = A.shape[0]
    out = []
    for k in range(1, n + 1):
        total = 0
        for S in itertools.combinations(range(n), k):
            minor = np.linalg.det(A[np.ix_(S, S)])
            total = total + minor * np.prod(diag_phases[:, S], axis=1)
        out.append(total)
    return out


def _rho_grid(A: np.ndarray, diag_phases: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if n > 3:
        return _rho_batch(A[None, :, :] * diag_phases[:, None, :])
    e = _principal_minor_sums(A, diag_phases)
    if n == 1:
        return np.abs(e[0])
    if n == 2:
        disc = np.sqrt(e[0] * e[0] - 4 * e[1])
        return np.maximum(np.abs(e[0] + disc), np.abs(e[0] - disc)) / 2
    return np.abs(_cubic_roots(-e[0], e[1], -e[2])).max(axis=-1)


def mu_lower(A, st: BlockStructure, phase_grid: int = 64, refine: bool = True, chunk: int = 1 << 16):
    """Lower bound ``max rho(A Phi)`` over unimodular structured ``Phi``.

    The first block phase is fixed to zero and the others range over a
    uniform grid of ``phase_grid`` angles each. With ``refine`` the best grid
    points are polished by a Nelder-Mead ascent, which can only raise the
    bound. Without refinement the result is monotone along nested grids
    (``phase_grid`` dividing a larger grid size).

    Args:
        A: ``n x n`` matrix.
        st: block structure.
        phase_grid: number of angles per free block phase.
        refine: polish the grid maximum locally.
        chunk: batch size for grid evaluation.

    Returns:
        ``(lower, phase_witness)``; ``phase_witness`` holds ``s`` unimodular
        scalars, rotated so that ``A diag(phase_witness)`` has the positive
        eigenvalue ``lower``.
    """
    M = _check(A, st)
    if phase_grid < 1:
        raise ValueError("phase_grid must be at least 1")
    free = st.s - 1
    angles = 2 * np.pi * np.arange(phase_grid) / phase_grid
    grids = np.meshgrid(*([angles] * free), indexing="ij")
    pts_all = np.stack([g.ravel() for g in grids], axis=-1) if free else np.zeros((1, 0))
    keep = 4
    best_vals = np.empty(0)
    best_pts = np.empty((0, free))
    for start in range(0, len(pts_all), chunk):
        pts = pts_all[start:start + chunk]
        phases = np.exp(1j * np.hstack([np.zeros((len(pts), 1)), pts]))
        vals = _rho_grid(M, st.expand(phases))
        order = np.argsort(vals)[::-1][:keep]
        best_vals = np.concatenate([best_vals, vals[order]])
        best_pts = np.vstack([best_pts, pts[order]])
        top = np.argsort(best_vals, kind="stable")[::-1][:keep]
        best_vals, best_pts = best_vals[top], best_pts[top]

    candidates = [p for p in best_pts]
    results = [_rho_at(M, st, p) + (p,) for p in candidates[:1]]
    if refine and free > 0:
        step = 2 * np.pi / phase_grid
        for p0 in candidates:
            simplex = np.vstack([p0] + [p0 + step / 2 * e for e in np.eye(free)])
            res = scipy.optimize.minimize(
                lambda p: -_rho_at(M, st, p)[0],
                p0,
                method="Nelder-Mead",
                options={"initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-14, "maxiter": 400 * free},
            )
            results.append(_rho_at(M, st, res.x) + (res.x,))
    rho, lam, pts = max(results, key=lambda r: r[0])
    phases = np.exp(1j * np.concatenate([[0.0], pts]))
    if rho > 0:
        phases = phases * np.conj(lam) / abs(lam)
    return rho, phases


def _unpack(x: np.ndarray, st: BlockStructure) -> tuple[np.ndarray, np.ndarray, list]:
    # scaling D = blockdiag(G_j) with G_j upper triangular, positive log diagonal;
    # the first diagonal entry is pinned to 1 since the norm is scale invariant
    n = st.n
    D = np.zeros((n, n), dtype=complex)
    Dinv = np.zeros((n, n), dtype=complex)
    blocks = []
    pos = 0
    for j, (o, r) in enumerate(zip(st.offsets()[:-1], st.block_sizes)):
        G = np.zeros((r, r), dtype=complex)
        logs = np.zeros(r)
        start = 1 if j == 0 else 0
        logs[start:] = x[pos:pos + r - start]
        pos += r - start
        G[np.diag_indices(r)] = np.exp(logs)
        for a in range(r):
            for b in range(a + 1, r):
                G[a, b] = x[pos] + 1j * x[pos + 1]
                pos += 2
        D[o:o + r, o:o + r] = G
        Dinv[o:o + r, o:o + r] = np.linalg.inv(G) if r > 1 else 1 / G
        blocks.append(G if r > 1 else float(G[0, 0].real))
    return D, Dinv, blocks


def _n_params(st: BlockStructure) -> int:
    return sum(r * r for r in st.block_sizes) - 1


def mu_upper(A, st: BlockStructure, iters: int = 64):
    """Upper bound ``min ||D A D^{-1}||`` over structure-commuting ``D``.

    ``D`` ranges over block-diagonal invertible matrices whose blocks match
    the structure; such ``D`` commute with every ``X`` in ``E`` so
    ``mu_E(A) = mu_E(D A D^{-1}) <= ||D A D^{-1}||``. Blocks of size one are
    positive scalars, larger blocks are upper triangular (by polar
    decomposition this covers all positive definite blocks). The spectral
    norm is smoothed by Schatten-``2p`` norms for ``p`` in 4, 64, 1024, each stage
    solved by BFGS from the previous point, followed by a Nelder-Mead polish
    of the exact norm.

    Args:
        A: ``n x n`` matrix.
        st: block structure.
        iters: iteration budget per optimization stage.

    Returns:
        ``(upper, scaling_witness)`` with one block per structure block.
    """
    M = _check(A, st)
    k = _n_params(st)
    x = np.zeros(k)
    _, _, blocks = _unpack(x, st)
    best = operator_norm(M)
    best_blocks = blocks
    if best == 0.0 or k == 0:
        return best, best_blocks

    def sv(x):
        D, Dinv, _ = _unpack(x, st)
        return np.linalg.svd(D @ M @ Dinv, compute_uv=False)

    def exact(x):
        return np.log(sv(x)[0])

    for p in (4, 64, 1024):
        def smooth(x, p=p):
            return logsumexp(2 * p * np.log(sv(x))) / (2 * p)

        res = scipy.optimize.minimize(smooth, x, method="BFGS", options={"maxiter": 4 * iters})
        if np.all(np.isfinite(res.x)):
            x = res.x
        val = float(np.exp(exact(x)))
        if val < best:
            best, best_blocks = val, _unpack(x, st)[2]
    step = 0.05
    simplex = np.vstack([x] + [x + step * e for e in np.eye(k)])
    res = scipy.optimize.minimize(
        exact,
        x,
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-15, "maxiter": 8 * iters * k},
    )
    val = float(np.exp(exact(res.x)))
    if val < best:
        best, best_blocks = val, _unpack(res.x, st)[2]
    return best, best_blocks


def mu_bounds(A, st: BlockStructure, phase_grid: int = 64, iters: int = 64) -> MuBounds:
    """Both bounds; the upper value is clipped from below by the lower one
    only when numerical noise inverts them by less than ``1e-12``."""
    lower, phases = mu_lower(A, st, phase_grid)
    upper, scaling = mu_upper(A, st, iters)
    if upper < lower and lower - upper < 1e-12 * max(1.0, lower):
        upper = lower
    return MuBounds(lower, upper, phases, scaling)


@dataclass
class GammaPoint:
    """Point of ``C^7``, ``C^5`` or ``C^3`` tagged with its domain.

    Attributes:
        variant: ``"E3311"``, ``"E3212"`` or ``"E2211"``.
        coords: complex coordinates.
        witness: optional matrix whose symmetrization gives ``coords``.
    """

    variant: str
    coords: np.ndarray
    witness: np.ndarray | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        self.coords = np.asarray(self.coords, dtype=complex)
        want = {"E3311": 7, "E3212": 5, "E2211": 3}[self.variant]
        if self.coords.shape != (want,):
            raise ShapeError(f"{self.variant} points have {want} coordinates")


def _det2(a, b, c, d):
    return a * d - b * c


def symmetrize7(A) -> GammaPoint:
    """Coordinates ``(a11, a22, a11a22-a12a21, a33, a11a33-a13a31, a22a33-a23a32, det A)``."""
    M = as_square(A, "A")
    if M.shape != (3, 3):
        raise ShapeError("symmetrize7 needs a 3x3 matrix")
    coords = [
        M[0, 0],
        M[1, 1],
        _det2(M[0, 0], M[0, 1], M[1, 0], M[1, 1]),
        M[2, 2],
        _det2(M[0, 0], M[0, 2], M[2, 0], M[2, 2]),
        _det2(M[1, 1], M[1, 2], M[2, 1], M[2, 2]),
        np.linalg.det(M),
    ]
    return GammaPoint("E3311", np.array(coords), M)


def symmetrize5(A) -> GammaPoint:
    """Coordinates ``(x1, x2, x3, y1, y2)`` of the 1+2 block structure."""
    M = as_square(A, "A")
    if M.shape != (3, 3):
        raise ShapeError("symmetrize5 needs a 3x3 matrix")
    coords = [
        M[0, 0],
        _det2(M[0, 0], M[0, 1], M[1, 0], M[1, 1]) + _det2(M[0, 0], M[0, 2], M[2, 0], M[2, 2]),
        np.linalg.det(M),
        M[1, 1] + M[2, 2],
        _det2(M[1, 1], M[1, 2], M[2, 1], M[2, 2]),
    ]
    return GammaPoint("E3212", np.array(coords), M)


def symmetrize3(A) -> GammaPoint:
    """Coordinates ``(a11, a22, det A)`` of a 2x2 matrix."""
    M = as_square(A, "A")
    if M.shape != (2, 2):
        raise ShapeError("symmetrize3 needs a 2x2 matrix")
    return GammaPoint("E2211", np.array([M[0, 0], M[1, 1], np.linalg.det(M)]), M)


SYMMETRIZE = {"E3311": symmetrize7, "E3212": symmetrize5, "E2211": symmetrize3}
STRUCTURE = {"E3311": E3311, "E3212": E3212, "E2211": E2211}


def _witness_residual(p: GammaPoint, tol: float, iters: int) -> dict:
    out = {}
    if p.witness is not None:
        sym = SYMMETRIZE[p.variant](p.witness).coords
        out["witness coords"] = float(np.max(np.abs(sym - p.coords)))
        upper, _ = mu_upper(p.witness, STRUCTURE[p.variant], iters)
        out["mu<=1"] = max(0.0, upper - 1.0)
    return out


def k_set_check(p: GammaPoint, tol: float = 1e-8, iters: int = 64) -> tuple[bool, dict]:
    """Distinguished-boundary test for 7-coordinate points.

    Checks ``|x7| = 1``, ``x1 = conj(x6) x7``, ``x3 = conj(x4) x7`` and
    ``x5 = conj(x2) x7``. When a witness matrix is attached, membership of
    the point in the domain is checked through ``mu_upper(witness) <= 1``.

    Returns:
        ``(passed, residuals)`` with one residual per condition.
    """
    if p.variant != "E3311":
        raise ValueError("k_set_check expects an E3311 point")
    x = p.coords
    res = {
        "|x7|=1": abs(abs(x[6]) - 1),
        "x1=conj(x6)x7": abs(x[0] - np.conj(x[5]) * x[6]),
        "x3=conj(x4)x7": abs(x[2] - np.conj(x[3]) * x[6]),
        "x5=conj(x2)x7": abs(x[4] - np.conj(x[1]) * x[6]),
    }
    res = {k: float(v) for k, v in res.items()}
    res.update(_witness_residual(p, tol, iters))
    return all(v <= tol for v in res.values()), res


def k1_set_check(p: GammaPoint, tol: float = 1e-8, iters: int = 64) -> tuple[bool, dict]:
    """Distinguished-boundary test for 5-coordinate points ``(x1, x2, x3, y1, y2)``.

    Checks ``|x3| = 1``, ``x1 = conj(y2) x3`` and ``x2 = conj(y1) x3``, plus
    the witness bound when a witness is attached.
    """
    if p.variant != "E3212":
        raise ValueError("k1_set_check expects an E3212 point")
    x1, x2, x3, y1, y2 = p.coords
    res = {
        "|x3|=1": abs(abs(x3) - 1),
        "x1=conj(y2)x3": abs(x1 - np.conj(y2) * x3),
        "x2=conj(y1)x3": abs(x2 - np.conj(y1) * x3),
    }
    res = {k: float(v) for k, v in res.items()}
    res.update(_witness_residual(p, tol, iters))
    return all(v <= tol for v in res.values()), res


def in_gamma(p: GammaPoint, tol: float = 1e-8, iters: int = 64) -> bool:
    """Witness-based membership: ``mu_E(witness) <= 1`` certified by the upper bound."""
    if p.witness is None:
        from .errors import MissingWitness

        raise MissingWitness("membership is only decided through a witness matrix")
    upper, _ = mu_upper(p.witness, STRUCTURE[p.variant], iters)
    return upper <= 1 + tol
