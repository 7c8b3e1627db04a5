"""
The partial Fourier transform and the majorant R
================================================

Shat is again a cyclotomic integer.  R aggregates its absolute mass over u;
we tabulate it on prime powers and compare with the prime-power bound.
"""

import numpy as np

from gl3kloosterman import r_function, rbound_check, shat_closed_form, shat_naive

# Closed form against the definition at (p^k, p^l) = (2^1, 2^3).
for u, t in [(0, 0), (1, 1), (4, 1)]:
    print(u, t, shat_naive(1, u, t, 1, 2, 8), shat_closed_form(1, u, t, 1, 2, 8))

# R(t, 9, 27) for every t, against the bound
rep = rbound_check(3, 2, 3)
print("bound holds:", rep["holds"])
for row in rep["rows"]:
    print(f"t={row['t']:2d} nu={row['nu']} R={row['R']:.3f} bound={row['bound']}")

# multiplicativity on coprime blocks
lhs = r_function(1, 12, 18).value
rhs = r_function(1, 4, 2).value * r_function(1, 3, 9).value
print("R(1,12,18) =", lhs, " product of blocks =", rhs, np.isclose(lhs, rhs))
