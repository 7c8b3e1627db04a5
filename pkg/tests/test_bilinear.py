import cmath
import math

import numpy as np
import pytest

from gl3kloosterman.bilinear import (
    CoeffSeq,
    a_bound_ratio,
    a_function,
    adversarial_gamma,
    bilinear_s,
    gcd_stratification,
    inner_sums,
    m_beta,
    random_sequence,
    theorem2_denominator,
    theorem2_experiment,
    theorem3_experiment,
)
from gl3kloosterman.errors import InvalidDivisors, InvalidHRange
from gl3kloosterman.gl3_sums import s_long_naive


def m_beta_oracle(beta, X1, X2, q_cap=None):
    """Direct triple loop, written independently of the library version."""
    qmax = min(X1, X2) if q_cap is None else min(X1, X2, q_cap)
    total = 0.0
    for q in range(1, qmax + 1):
        for d1 in range(1, q + 1):
            if q % d1:
                continue
            for c in range(1, X1 // q + 1):
                if math.gcd(c, q) != 1:
                    continue
                for t in range(c):
                    if math.gcd(t, c) != 1:
                        continue
                    s = sum(v * cmath.exp(2j * math.pi * t * n / c)
                            for n, v in beta.entries.items() if math.gcd(n, q) == d1)
                    total += d1 / q * abs(s) ** 2
    return total


def signs20():
    return CoeffSeq.from_array(np.random.default_rng(0).choice([-1.0, 1.0], 20))


def test_coeffseq_invariants(tmp_path):
    with pytest.raises(ValueError):
        CoeffSeq({5: 1.0}, 4)
    with pytest.raises(ValueError):
        CoeffSeq({(1, 1): 2.0}, (2, 2), is_gamma=True)
    with pytest.raises(ValueError):
        CoeffSeq({(3, 1): 1.0}, (2, 2), is_gamma=True)
    a = CoeffSeq({1: 3.0, 2: 4j}, 3)
    assert a.norm() == pytest.approx(5.0)
    path = tmp_path / "a.csv"
    a.write_csv(path)
    assert path.read_text().splitlines()[0] == "index,re,im"
    b = CoeffSeq.read_csv(path, 3)
    assert b.entries == a.entries
    g = CoeffSeq({(1, 2): 0.5j, (3, 1): -1.0}, (3, 2), is_gamma=True)
    g.write_csv(tmp_path / "g.csv")
    assert CoeffSeq.read_csv(tmp_path / "g.csv", is_gamma=True).entries == g.entries


def test_bilinear_trivial():
    one = CoeffSeq.delta(1, 1)
    assert bilinear_s(one, one, CoeffSeq.delta((1, 1), (1, 1), is_gamma=True)) == pytest.approx(1.0)


def test_bilinear_dual_evaluator_and_signs():
    rng = np.random.default_rng(5)
    alpha = random_sequence(rng, 5, "phase")
    beta = random_sequence(rng, 5, "sign")
    gamma = CoeffSeq({(d1, d2): complex(np.exp(2j * np.pi * rng.random()))
                      for d1 in range(1, 11) for d2 in range(1, 11)}, (10, 10), is_gamma=True)
    for signs in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
        fast = bilinear_s(alpha, beta, gamma, signs)
        naive = bilinear_s(alpha, beta, gamma, signs, method="naive")
        assert abs(fast - naive) < 1e-8
    # signed variant against directly substituted sums
    direct = sum(
        g * alpha.entries[m] * beta.entries[n]
        * complex(s_long_naive(1, -m, n, 1, d1, d2))
        for (d1, d2), g in gamma.entries.items() if d1 <= 4 and d2 <= 4
        for m in range(1, 6) for n in range(1, 6))
    small = CoeffSeq({k: v for k, v in gamma.entries.items() if k[0] <= 4 and k[1] <= 4},
                     (10, 10), is_gamma=True)
    assert abs(bilinear_s(alpha, beta, small, (-1, 1)) - direct) < 1e-8


def test_linearity():
    rng = np.random.default_rng(2)
    a1, a2, b = (random_sequence(rng, 6, "phase") for _ in range(3))
    g = CoeffSeq({(d1, d2): 1.0 for d1 in range(1, 6) for d2 in range(1, 6)}, (5, 5), is_gamma=True)
    a12 = CoeffSeq.from_array(a1.as_array() + 2 * a2.as_array())
    lhs = bilinear_s(a12, b, g)
    rhs = bilinear_s(a1, b, g) + 2 * bilinear_s(a2, b, g)
    assert abs(lhs - rhs) < 1e-9


def test_m_beta_examples():
    assert m_beta(CoeffSeq.delta(1, 1), 1, 1) == pytest.approx(1.0)
    beta = signs20()
    assert m_beta(beta, 5, 5) == pytest.approx(m_beta_oracle(beta, 5, 5), abs=1e-8)
    assert m_beta(beta, 5, 5, 2) == pytest.approx(m_beta_oracle(beta, 5, 5, 2), abs=1e-8)
    assert m_beta(beta, 7, 4) == pytest.approx(m_beta_oracle(beta, 7, 4), abs=1e-8)
    # frozen regression value
    assert m_beta(beta, 5, 5) == pytest.approx(158.7, abs=1e-9)


def test_m_beta_cap_at_top_is_exact():
    beta = signs20()
    assert m_beta(beta, 5, 5, q_cap=5) == m_beta(beta, 5, 5)
    assert m_beta(beta, 6, 4, q_cap=4) == m_beta(beta, 6, 4)


def test_m_star_with_unit_cap_is_the_q1_stratum():
    beta = signs20()
    X = 5
    b = beta.as_array()
    n = np.arange(1, 21)
    expected = sum(
        abs(np.sum(b * np.exp(2j * np.pi * t * n / c))) ** 2
        for c in range(1, X + 1) for t in range(c) if math.gcd(t, c) == 1)
    assert m_beta(beta, X, X, q_cap=1) == pytest.approx(expected, abs=1e-8)


def test_a_function():
    assert a_function(1, 1, 1) == 1
    assert a_function(2, 2, 2) == 3
    assert a_function(1, 1, 6) == 12
    assert a_function(2, 3, 30) == 6  # only p = 5 is coprime to both
    for bad in ((4, 1, 4), (2, 1, 3), (1, 1, 12)):
        with pytest.raises(InvalidDivisors):
            a_function(*bad)


def test_a_bound_constant():
    worst = 0.0
    for q in range(1, 211):
        if all(q % (p * p) for p in range(2, 15)):
            ds = [d for d in range(1, q + 1) if q % d == 0]
            worst = max(worst, max(a_bound_ratio(x, y, q) for x in ds for y in ds))
    assert worst == pytest.approx(2.742857142857, abs=1e-9)


def test_theorem2_zero_beta():
    rep = theorem2_experiment(4, 3, 3, trials=1)
    assert rep[0].ratio >= 0
    alpha = CoeffSeq.from_array([1.0, -1.0])
    zero = CoeffSeq({}, 2)
    inner = inner_sums(alpha, zero, [(d1, d2) for d1 in range(1, 4) for d2 in range(1, 4)])
    assert sum(abs(v) for v in inner.values()) == 0.0


def test_adversarial_gamma_attains_sum_of_moduli():
    rng = np.random.default_rng(4)
    a, b = random_sequence(rng, 6, "sign"), random_sequence(rng, 6, "phase")
    pairs = [(d1, d2) for d1 in range(1, 6) for d2 in range(1, 6)]
    inner = inner_sums(a, b, pairs)
    g = adversarial_gamma(inner, 5, 5)
    assert all(abs(v) <= 1 + 1e-12 for v in g.entries.values())
    assert abs(bilinear_s(a, b, g)) == pytest.approx(sum(abs(v) for v in inner.values()))


def test_theorem2_reports():
    reps = theorem2_experiment(8, 4, 4, trials=4, seed=3)
    assert len(reps) == 4
    for r in reps:
        assert math.isfinite(r.ratio)
        assert r.ratio == pytest.approx(r.lhs / r.rhs_components["theorem2"])
        assert set(r.rhs_components) == {"theorem2", "weil", "corollary1"}
    again = theorem2_experiment(8, 4, 4, trials=4, seed=3)
    assert [r.ratio for r in reps] == [r.ratio for r in again]


def test_theorem3_degeneration_and_range():
    reps = theorem3_experiment(8, 5, 5, 5, 5, trials=3, seed=2)
    assert all(r.extra["degenerates_to_theorem2"] for r in reps)
    t2 = theorem2_experiment(8, 5, 5, trials=3, seed=2)
    for r3, r2 in zip(reps, t2):
        assert r3.rhs_components["first"] == 2 * theorem2_denominator(
            r2.extra["M_alpha"], r2.extra["M_beta"], 5, 5)
    with pytest.raises(InvalidHRange):
        theorem3_experiment(4, 4, 4, 5, 1, trials=1)
    with pytest.raises(InvalidHRange):
        theorem3_experiment(4, 4, 4, 0, 1, trials=1)


def test_stratification():
    rng = np.random.default_rng(9)
    alpha, beta = random_sequence(rng, 8, "phase"), random_sequence(rng, 8, "sign")
    full = CoeffSeq({(d1, d2): complex(np.exp(2j * np.pi * rng.random()))
                     for d1 in range(1, 7) for d2 in range(1, 7)}, (6, 6), is_gamma=True)
    rep = gcd_stratification(alpha, beta, full)
    assert rep["additive"] and rep["coprime_product_form_agrees"] and rep["equal_prime_table_agrees"]
    coprime_only = CoeffSeq({k: v for k, v in full.entries.items() if math.gcd(*k) == 1},
                            (6, 6), is_gamma=True)
    assert gcd_stratification(alpha, beta, coprime_only)["strata"]["remainder"] == 0
    for p in (2, 3, 5):
        rep = gcd_stratification(alpha, beta, CoeffSeq.delta((p, p), (6, 6), is_gamma=True))
        assert rep["equal_prime_table_agrees"]
        assert rep["strata"]["equal_prime"] == pytest.approx(rep["total"])
