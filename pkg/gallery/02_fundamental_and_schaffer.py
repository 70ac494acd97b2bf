"""Solve the fundamental equations of a compressed model tuple and build its
Schaffer dilation.

Run: python gallery/02_fundamental_and_schaffer.py
"""

from gammalab.dilation import corner_recovery7, dilation_identity_check, schaffer7
from gammalab.fundamental import solve_fundamental7, verify_recurrence7
from gammalab.generators import compressed_contraction7

t = compressed_contraction7(seed=1, d=2, k=4)
print(f"tuple of {t.n}x{t.n} matrices, commutation residual {t.commutation_residual:.1e}")

f = solve_fundamental7(t)
print("defect rank:", f.rank)
print(f.report(1e-10).format())
print("recurrence residual:", verify_recurrence7(t, f).max())

d = schaffer7(t, f, levels=16)
print("lifted size:", d.V[0].shape)
print("lift residual:", d.lift_residuals.max())
print("dilation identity, degree <= 8:", dilation_identity_check(d, t, 8))
print("corner recovery:", corner_recovery7(d, f))
print(f"isometry defect: interior {d.interior_defect:.1e}, top level {d.boundary_defect:.1e}")
