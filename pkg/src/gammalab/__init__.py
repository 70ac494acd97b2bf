"""Numerical toolkit for commuting operator tuples associated with the
tetrablock-type domains defined by ``mu_E(A) <= 1``.

Modules:
    kernel: norms, numerical radius, defect operators, limits, joint
        diagonalization.
    mu: structured singular value bounds and symmetrization maps.
    fundamental: tuples and their fundamental operators.
    hardy: truncated Hardy spaces, characteristic functions, pencil models.
    dilation: Schaffer dilations, Douglas embeddings, canonical unitary
        parts, converse construction, circulant models, Wold verifier.
    generators: seeded valid test objects.
    io, cli: JSON files and the command line.
"""

from .errors import *  # noqa: F401,F403
from .fundamental import (
    FundamentalSet5,
    FundamentalSet7,
    Gamma5Tuple,
    Gamma7Tuple,
    commutativity_conditions5,
    commutativity_conditions7,
    make_tuple,
    pencil_conditions5,
    pencil_conditions7,
    pencil_numerical_radius,
    solve_fundamental5,
    solve_fundamental7,
    verify_recurrence5,
    verify_recurrence7,
)
from .kernel import (
    defect_pair,
    joint_diagonalize,
    numerical_radius,
    operator_norm,
    psd_sqrt,
    range_basis,
    sot_limit_q,
    spectral_radius,
)
from .mu import (
    E2211,
    E3212,
    E3311,
    BlockStructure,
    GammaPoint,
    MuBounds,
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
from .report import Check, Report

__version__ = "0.1.0"
