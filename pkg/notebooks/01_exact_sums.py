"""
Exact GL(3) Kloosterman sums
============================

Evaluate a few long-element sums exactly, compare the two evaluators and
look at the prime-by-prime table.
"""

import itertools

from gl3kloosterman import s_long_fast, s_long_naive, twisted_factor

# The sums are cyclotomic integers; small cases are rational.
print("S(1,1,1,1;3,3) =", s_long_naive(1, 1, 1, 1, 3, 3))
print("S(1,3,3,1;3,3) =", s_long_naive(1, 3, 3, 1, 3, 3))

# A value that is not rational: it lives in Z[zeta_5].
v = s_long_naive(1, 1, 1, 1, 15, 8)
print("S(1,1,1,1;15,8) =", v, "~", complex(v))

# The structured evaluator splits the moduli prime by prime.
assert s_long_fast(1, 1, 1, 1, 15, 8) == v

# Prime-by-prime table: p+1, p^2-p+1 or 1 depending on which of m, n p divides.
p = 5
for m, n in itertools.product((1, 5), repeat=2):
    print(f"p={p} m={m} n={n}:", s_long_naive(1, m, n, 1, p, p))

# Splitting (6, 10) into the (2, 2) and (3, 5) blocks with twisted arguments.
e_part, g_part = twisted_factor(1, 1, 1, 1, 6, 10)
print("E-part", e_part, "g-part", g_part, "product", e_part * g_part)
