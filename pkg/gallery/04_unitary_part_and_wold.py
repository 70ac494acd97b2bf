"""Canonical unitary part of a mixed tuple and a Wold-type splitting check.

Run: python gallery/04_unitary_part_and_wold.py
"""

import numpy as np
import scipy.linalg

from gammalab.dilation import canonical_unitary7, circulant_gamma_unitary, douglas_embedding, wold_verify
from gammalab.fundamental import Gamma7Tuple
from gammalab.generators import diag_symbol_family7, mixed_tuple7
from gammalab.hardy import pencil_model7

t = mixed_tuple7(seed=4, unitary_dim=3, stable_levels=3, conjugate=True)
c = canonical_unitary7(t)
print("rank of Q:", c.rank)
print(c.report.format())
print("joint spectrum (columns):")
print(np.round(c.spectra, 4))

print(douglas_embedding(t, levels=8).report.format())

P = pencil_model7(diag_symbol_family7(1, 2), 5)
U = circulant_gamma_unitary(diag_symbol_family7(2, 1), 4)
V = Gamma7Tuple([scipy.linalg.block_diag(a, b) for a, b in zip(P.mats, U.mats)])
print("clean split passes:", wold_verify(V, 10, 2).passed)
mats = [m.copy() for m in V.mats]
mats[0][12, 4] += 1e-3
rep = wold_verify(Gamma7Tuple(mats), 10, 2)
print("perturbed split passes:", rep.passed, "worst cross block:", rep.data["worst_cross"])
