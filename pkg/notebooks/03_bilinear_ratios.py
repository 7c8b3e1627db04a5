"""
Bilinear forms and bound ratios
===============================

Random +-1 coefficients, the worst-case gamma, and the ratio of the
bilinear form to the large-sieve bound.  Plotting is left to the reader;
the rows below are what ``gl3k experiment theorem2`` writes as CSV.
"""

import numpy as np

from gl3kloosterman.bilinear import (
    CoeffSeq,
    gcd_stratification,
    m_beta,
    random_sequence,
    theorem2_experiment,
    theorem3_experiment,
)

for N in (4, 8, 16):
    for X in (4, 6, 8):
        reps = theorem2_experiment(N, X, X, trials=5, seed=1)
        worst = max(reps, key=lambda r: r.ratio)
        print(f"N={N:2d} X={X}: max ratio {worst.ratio:.4f}  weil ratio {worst.extra['weil_ratio']:.4f}")

# Shrinking H trades the large-sieve term for the trivial one.
for H in (1, 2, 4, 8):
    r = max(theorem3_experiment(8, 8, 8, H, H, trials=5, seed=1), key=lambda r: r.ratio)
    print(f"H={H}: ratio {r.ratio:.4f} first {r.rhs_components['first']:.1f} second {r.rhs_components['second']:.1f}")

# The large-sieve quantity against (X^2 + N) ||beta||^2
beta = CoeffSeq.from_array(np.random.default_rng(0).choice([-1.0, 1.0], 20))
print("M(beta) / ((X^2+N)||beta||^2) =", m_beta(beta, 5, 5) / ((25 + 20) * beta.norm() ** 2))

# Where the mass of the form sits, by gcd(D1, D2)
rng = np.random.default_rng(2)
alpha, beta = random_sequence(rng, 8, "phase"), random_sequence(rng, 8, "sign")
gamma = CoeffSeq({(a, b): 1.0 for a in range(1, 7) for b in range(1, 7)}, (6, 6), is_gamma=True)
rep = gcd_stratification(alpha, beta, gamma)
print({k: round(v, 3) for k, v in rep["magnitudes"].items()}, "additive:", rep["additive"])
