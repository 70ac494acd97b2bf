"""Characteristic function, the W identity and the converse construction.

Run: python gallery/03_theta_and_converse.py
"""

import numpy as np

from gammalab.dilation import admissible_construct7
from gammalab.generators import diag_symbol_family7
from gammalab.hardy import theta_series, w_property_residual
from gammalab.kernel import adjoint

T = np.array([[0.5]])
th = theta_series(T, 5)
print("Theta coefficients of T=0.5:", np.round([c[0, 0] for c in th.coefficients], 6))

zero = np.zeros((1, 1))
print("W identity at T=0, classical:", w_property_residual(zero, 16))
print("W identity at T=0, formula without the z factor:", w_property_residual(zero, 16, convention="literal"))

T7 = np.diag([0.4, -0.3j, 0.2])
Ft = diag_symbol_family7(3, 3)
r = admissible_construct7(T7, Ft, levels=32, F=[adjoint(x) for x in Ft])
print(r.report.format())
