import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl3kloosterman.arith import euler_phi, units
from gl3kloosterman.errors import CoprimalityViolated, ModuliNotCoprime, NotPrimePower
from gl3kloosterman.gl3_sums import s_long_naive
from gl3kloosterman.transforms import (
    ShatArgs,
    corollary_divisor_sum,
    fourier_inversion,
    lemma10_bound,
    r_function,
    r_prime_function,
    rbound_check,
    reverse_moduli_check,
    shat_closed_form,
    shat_factorization_check,
    shat_literal,
    shat_naive,
    v_decomposition,
)


def unit_list(D):
    return [int(x) for x in units(D)] if D > 1 else [1]


def test_shat_args_validation():
    with pytest.raises(CoprimalityViolated):
        ShatArgs(2, 0, 0, 1, 4, 4)
    with pytest.raises(CoprimalityViolated):
        shat_naive(1, 0, 0, 3, 4, 9)


def test_frozen_shat_values():
    assert shat_naive(1, 1, 1, 1, 4, 8) == -1
    assert shat_naive(1, 0, 0, 1, 9, 9) == 9
    assert shat_naive(1, 2, 3, 1, 4, 4).is_zero()


@pytest.mark.parametrize("D1,D2", [(1, 1), (2, 3), (3, 3), (4, 2), (2, 4), (4, 4)])
def test_literal_double_sum_matches_orthogonality(D1, D2):
    for a in unit_list(D1):
        for b in unit_list(D2):
            for u, t in itertools.product(range(D2), range(D1)):
                assert shat_literal(a, u, t, b, D1, D2) == shat_naive(a, u, t, b, D1, D2)


def test_fourier_inversion_small():
    for D1, D2 in itertools.product(range(1, 5), repeat=2):
        for m, n in itertools.product(range(D2), range(D1)):
            assert fourier_inversion(1, m, n, 1, D1, D2) == s_long_naive(1, m or D2, n or D1, 1, D1, D2)


@pytest.mark.parametrize("p,k,l", [(2, 0, 2), (3, 2, 0), (2, 1, 1), (3, 1, 1), (2, 1, 3), (3, 2, 1),
                                   (2, 3, 2), (3, 2, 3), (5, 1, 2), (5, 2, 1)])
def test_closed_forms(p, k, l):
    D1, D2 = p**k, p**l
    for a in unit_list(D1)[:4]:
        for b in unit_list(D2)[:4]:
            for u, t in itertools.product(range(D2), range(D1)):
                assert shat_closed_form(a, u, t, b, D1, D2) == shat_naive(a, u, t, b, D1, D2)


def test_closed_form_edges():
    assert shat_closed_form(1, 0, 0, 1, 9, 9) is None
    with pytest.raises(NotPrimePower):
        shat_closed_form(1, 0, 0, 1, 6, 2)
    with pytest.raises(NotPrimePower):
        shat_closed_form(1, 0, 0, 1, 4, 9)
    # l > k >= 2 vanishes unless p^nu || u
    assert shat_closed_form(1, 1, 2, 1, 4, 8).is_zero()


@pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (3, 2)])
def test_v_decomposition(p, k):
    D = p**k
    for a in unit_list(D)[:3]:
        for t in range(D):
            nu = next(j for j in range(k, -1, -1) if t % p**j == 0)
            mass = 0.0
            for u in range(D):
                parts = v_decomposition(a, u, t, 1, p, k)
                assert len(parts) == k + 1 and parts[0].is_zero()
                total = parts[0]
                for v in parts[1:]:
                    total = total + v
                assert total == shat_naive(a, u, t, 1, D, D)
                for k1 in range(1, k):
                    if k1 < nu < k:
                        assert parts[k1].is_zero()
                if nu == k:
                    for k1 in range(1, k + 1):
                        expected = p**k1 if (k - k1 == 1 and u % D == 0) else 0
                        if k1 < k:
                            assert parts[k1] == expected
                mass += abs(complex(parts[k]))
            assert abs(mass - euler_phi(D)) < 1e-8


def test_shat_factorization():
    for C1, C2, E1, E2 in ((2, 4, 3, 5), (2, 2, 3, 3), (4, 2, 3, 9), (1, 2, 3, 5)):
        for a in unit_list(C1 * E1)[:2]:
            for u, t in itertools.product(range(min(C2 * E2, 5)), range(min(C1 * E1, 5))):
                assert shat_factorization_check(a, u, t, C1, E1, C2, E2)
    with pytest.raises(ModuliNotCoprime):
        shat_factorization_check(1, 0, 0, 2, 2, 1, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.data())
def test_reverse_moduli_property(D1, D2, data):
    a = data.draw(st.sampled_from(unit_list(D1)))
    b = data.draw(st.sampled_from(unit_list(D2)))
    u, t = data.draw(st.integers(0, D2 - 1)), data.draw(st.integers(0, D1 - 1))
    assert reverse_moduli_check(a, u, t, b, D1, D2)


def test_r_values():
    assert r_function(0, 1, 1).value == pytest.approx(1.0)
    assert [r_function(t, 4, 4).value for t in range(4)] == pytest.approx([4.0, 2.0, 2.0, 2.0])
    assert r_function(1, 6, 6).value == pytest.approx(
        r_function(1, 2, 2).value * r_function(1, 3, 3).value)
    for p in (2, 3, 5):
        for t in range(p):
            assert r_function(t, p, p).value <= p + 1e-9
    rv = r_prime_function(1, 4, 8)
    assert rv.dual and rv.value == pytest.approx(r_function(1, 8, 4).value)


def test_r_multiplicativity():
    for D1, D2 in itertools.product(range(1, 37), repeat=2):
        if D1 * D2 > 36:
            continue
        for C1, C2, E1, E2 in _splits(D1, D2):
            for t in range(D1):
                assert r_function(t, D1, D2).value == pytest.approx(
                    r_function(t, C1, C2).value * r_function(t, E1, E2).value, abs=1e-8)


def _splits(D1, D2):
    g = math.gcd(D1 * D2, 2**10)
    if 1 < g < D1 * D2:
        C1, C2 = math.gcd(D1, 2**10), math.gcd(D2, 2**10)
        yield C1, C2, D1 // C1, D2 // C2


@pytest.mark.parametrize("p", [2, 3, 5])
def test_lemma10(p):
    for k, l in itertools.product(range(4), repeat=2):
        rep = rbound_check(p, k, l)
        assert rep["holds"], (p, k, l)
        assert rep["corollary_constant"] <= 1.0 + 1e-9


def test_bound_helpers():
    assert lemma10_bound(0, 2, 3, 3) == 4 * 8  # nu = 3 is too large for the extra term
    assert lemma10_bound(1, 2, 3, 3) == 4 * 8 + 8
    assert corollary_divisor_sum(0, 8, 8) == 1 + 2 + 4
    assert corollary_divisor_sum(1, 8, 8) == 1
