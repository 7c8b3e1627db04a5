import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl3kloosterman.cyclotomic import CycInt, add, cyc_sum, eq, is_zero, mul, root_of_unity, to_complex
from gl3kloosterman.errors import OrderOverflow


def zeta(a, n):
    return root_of_unity(a, n)


def test_root_of_unity_basics():
    assert zeta(0, 7) == 1
    assert zeta(3, 3) == CycInt(1)
    assert zeta(1, 2) == -1
    assert zeta(1, 4) * zeta(1, 4) == -1
    assert zeta(2, 8) == zeta(1, 4)


@pytest.mark.parametrize("n", [2, 3, 4, 6, 8, 9, 12, 30, 36])
def test_full_orbit_sums_to_zero(n):
    assert is_zero(cyc_sum(zeta(j, n) for j in range(n)))


def test_ramanujan_style_identity():
    # primitive 12th roots sum to mu(12) = 0, primitive 6th roots to mu(6) = 1
    assert cyc_sum(zeta(j, 12) for j in (1, 5, 7, 11)).is_zero()
    assert cyc_sum(zeta(j, 6) for j in (1, 5)) == 1


def test_order_shrinks_to_minimal_field():
    x = zeta(3, 12) + zeta(9, 12)  # i + (-i)
    assert x.is_zero()
    y = zeta(4, 12)
    assert y.order == 3
    assert (zeta(1, 15) * zeta(14, 15)).order == 1


def test_hash_consistent_with_equality():
    a = zeta(1, 3) + zeta(2, 3)
    assert a == -1 and hash(a) == hash(CycInt(-1))
    assert len({zeta(2, 8), zeta(1, 4), zeta(6, 24)}) == 1


def test_integer_mixing_and_repr():
    x = 3 - zeta(1, 5) * 2
    assert x + 2 * zeta(1, 5) == 3
    assert repr(CycInt(7)) == "CycInt(7)"
    assert x.to_dict()["order"] == 5


def test_to_complex_and_int():
    z = zeta(1, 8)
    assert abs(to_complex(z) - cmath.exp(2j * cmath.pi / 8)) < 1e-15
    assert int(CycInt(-4)) == -4
    with pytest.raises(ValueError):
        int(z)


def test_exact_div():
    x = (zeta(1, 7) + 1) * 6
    assert x.exact_div(3) == (zeta(1, 7) + 1) * 2
    with pytest.raises(ValueError):
        x.exact_div(4)


def test_order_cap():
    with pytest.raises(OrderOverflow):
        CycInt.from_counts([1] * 10, 10, cap=5)
    with pytest.raises(OrderOverflow):
        add(zeta(1, 101), zeta(1, 103), cap=1000)


def test_big_coefficients_do_not_overflow():
    x = CycInt(2**40) + zeta(1, 9) * 2**40
    y = x * x * x
    assert abs(complex(y) - complex(x) ** 3) / abs(complex(x) ** 3) < 1e-12
    assert (y * 2**70).exact_div(2**70) == y


def test_functional_aliases():
    a, b = zeta(1, 5), zeta(2, 10)
    assert eq(mul(a, b), a * b) and eq(add(a, b), a + b)


elements = st.builds(
    lambda n, coeffs: CycInt.from_counts(np.array(coeffs[:n] + [0] * (n - len(coeffs[:n]))), n),
    st.sampled_from([1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15]),
    st.lists(st.integers(-5, 5), min_size=1, max_size=15),
)


@settings(max_examples=150, deadline=None)
@given(elements, elements, elements)
def test_ring_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x - x).is_zero()


@settings(max_examples=150, deadline=None)
@given(elements, elements)
def test_complex_embedding_is_homomorphism(x, y):
    assert abs(complex(x * y) - complex(x) * complex(y)) < 1e-9 * (1 + abs(complex(x)) * abs(complex(y)))
    assert abs(complex(x + y) - complex(x) - complex(y)) < 1e-9


@settings(max_examples=100, deadline=None)
@given(elements)
def test_zero_test_matches_numerics(x):
    if x.is_zero():
        assert abs(complex(x)) < 1e-12
    elif abs(complex(x)) > 1e-6:
        assert not x.is_zero()
    assert (x * 0).is_zero()
