"""Bracket mu for the three block structures and map a matrix into domain
coordinates.

Run: python gallery/01_mu_bracket.py
"""

import numpy as np

from gammalab.mu import E2211, E3212, E3311, k_set_check, mu_bounds, symmetrize7

rng = np.random.default_rng(0)
for st in (E3311, E3212, E2211):
    A = rng.standard_normal((st.n, st.n)) + 1j * rng.standard_normal((st.n, st.n))
    b = mu_bounds(A, st, phase_grid=128)
    print(f"E({st.n}; {st.s}; {','.join(map(str, st.block_sizes))})  lower={b.lower:.10f}  upper={b.upper:.10f}  gap={b.gap:.1e}")

# a unitary diagonal witness lands on the distinguished boundary
p = symmetrize7(np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 3))))
ok, res = k_set_check(p)
print("boundary point:", ok, {k: f"{v:.1e}" for k, v in res.items()})
