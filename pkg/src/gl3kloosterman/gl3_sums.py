"""GL(3) long-element Kloosterman sums.

Conventions: ``S(m1, m2, n1, n2, D1, D2)`` sums over ``B1, C1 mod D1`` and
``B2, C2 mod D2`` with ``(B1, C1, D1) = (B2, C2, D2) = 1`` and
``D1*C2 + B1*B2 + C1*D2 = 0 mod D1*D2``, the phase being

    e((m1*B1 + n1*(Y1*D2 - Z1*B2)) / D1) * e((m2*B2 + n2*(Y2*D1 - Z2*B1)) / D2)

with ``Y_i*B_i + Z_i*C_i = 1 mod D_i``.  Every valid tuple therefore
contributes the exponent pair ``(B1, W1, B2, W2)`` with
``W1 = Y1*D2 - Z1*B2 mod D1`` and ``W2 = Y2*D1 - Z2*B1 mod D2``; these arrays
do not depend on the frequencies and are cached per modulus pair.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import (
    _inverses,
    classical_kloosterman,
    factorize,
    mod_inverse,
    nu_p,
    ramanujan_sum,
    units,
)
from .cyclotomic import CycInt, mul
from .errors import (
    CapExceeded,
    InvalidArguments,
    InvalidDecomposition,
    ModuliNotCoprime,
)

# Work cap for the definition-level evaluator, counted in candidate tuples
# D1*D2*min(D1, D2) (the last coordinate is solved from the congruence).
DEFAULT_NAIVE_CAP = 10**7


def naive_cost(D1: int, D2: int) -> int:
    return D1 * D2 * min(D1, D2)


def _check_cap(D1: int, D2: int, cap: int | None) -> None:
    cap = DEFAULT_NAIVE_CAP if cap is None else cap
    if naive_cost(D1, D2) > cap:
        raise CapExceeded(
            f"naive evaluation at ({D1}, {D2}) needs {naive_cost(D1, D2)} steps > cap {cap}"
        )


@dataclass(frozen=True)
class Gl3KloostermanArgs:
    m1: int
    m2: int
    n1: int
    n2: int
    D1: int
    D2: int

    def __post_init__(self):
        if self.D1 < 1 or self.D2 < 1:
            raise InvalidArguments("moduli must be positive")
        if 0 in (self.m1, self.m2, self.n1, self.n2):
            raise InvalidArguments("frequencies must be nonzero")

    def astuple(self) -> tuple[int, int, int, int, int, int]:
        return (self.m1, self.m2, self.n1, self.n2, self.D1, self.D2)


@dataclass(frozen=True)
class ModuliDecomposition:
    """``D1 = q*h1*E1``, ``D2 = q*h2*E2`` with ``g_i = q*h_i``."""

    q: int
    h1: int
    h2: int
    E1: int
    E2: int

    @property
    def g1(self) -> int:
        return self.q * self.h1

    @property
    def g2(self) -> int:
        return self.q * self.h2

    @property
    def D1(self) -> int:
        return self.q * self.h1 * self.E1

    @property
    def D2(self) -> int:
        return self.q * self.h2 * self.E2

    def is_valid(self) -> bool:
        q, h1, h2, E1, E2 = self.q, self.h1, self.h2, self.E1, self.E2
        if min(q, h1, h2, E1, E2) < 1:
            return False
        if math.gcd(E1 * E2, q * h1 * h2) != 1 or math.gcd(E1, E2) != 1:
            return False
        if math.gcd(q, h1 * h2) != 1:
            return False
        if any(e > 1 for _, e in factorize(q).factors):
            return False
        for p in factorize(h1 * h2).primes:
            a, b = _val(h1, p), _val(h2, p)
            if (a >= 1) != (b >= 1) or max(a, b) < 2:
                return False
        return True


def _val(n: int, p: int) -> int:
    return nu_p(n, p) if n % p == 0 else 0


def _inv(a: int, m: int) -> int:
    return mod_inverse(a, m) if m > 1 else 0


# ---------------------------------------------------------------------------
# definition-level enumeration


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    return a, x0, y0


@lru_cache(maxsize=256)
def _yz_table(D: int) -> tuple[np.ndarray, np.ndarray]:
    """One solution of ``Y*B + Z*C = 1 mod D`` for every primitive pair (B, C)."""
    Y = np.zeros((D, D), dtype=np.int64)
    Z = np.zeros((D, D), dtype=np.int64)
    if D == 1:
        return Y, Z
    for B in range(D):
        for C in range(D):
            g, y, z = _ext_gcd(B, C)
            if g == 0 or math.gcd(g, D) != 1:
                continue
            gi = pow(g, -1, D)
            Y[B, C] = y * gi % D
            Z[B, C] = z * gi % D
    return Y, Z


@lru_cache(maxsize=1024)
def _tuples(D1: int, D2: int) -> np.ndarray:
    """Rows ``(B1, W1, B2, W2)`` over every valid tuple, representatives in [0, D)."""
    if D1 > D2:
        # enumerate with the roles of the moduli exchanged, then map back
        rows = _enumerate(D2, D1)
        B2, C2, B1, C1 = rows.T
    else:
        B1, C1, B2, C2 = _enumerate(D1, D2).T
    Y1, Z1 = _yz_table(D1)
    Y2, Z2 = _yz_table(D2)
    W1 = (Y1[B1, C1] * D2 - Z1[B1, C1] * B2) % D1
    W2 = (Y2[B2, C2] * D1 - Z2[B2, C2] * B1) % D2
    out = np.stack([B1, W1, B2, W2], axis=1)
    out.setflags(write=False)
    return out


def _enumerate(D1: int, D2: int) -> np.ndarray:
    """All (B1, C1, B2, C2) satisfying the primitivity and congruence conditions.

    Symmetric in the two moduli (the congruence is), so the caller may swap.
    Loops over B1 and vectorizes over (C1, B2); C2 is solved mod D2.
    """
    C1, B2 = np.meshgrid(np.arange(D1), np.arange(D2), indexing="ij")
    C1, B2 = C1.ravel(), B2.ravel()
    chunks = []
    for b1 in range(D1):
        ok = np.gcd(np.gcd(b1, C1), D1) == 1
        s = b1 * B2 + C1 * D2
        ok &= s % D1 == 0
        c1, b2 = C1[ok], B2[ok]
        c2 = (-(s[ok] // D1)) % D2
        ok2 = np.gcd(np.gcd(b2, c2), D2) == 1
        n = int(ok2.sum())
        chunks.append(np.stack([np.full(n, b1), c1[ok2], b2[ok2], c2[ok2]], axis=1))
    return np.concatenate(chunks).astype(np.int64)


def tuple_count(D1: int, D2: int) -> int:
    return len(_tuples(D1, D2))


def _s_long(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int,
            cap: int | None = None) -> CycInt:
    """Definition-level evaluation; zero frequencies allowed."""
    _check_cap(D1, D2, cap)
    T = _tuples(D1, D2)
    N = D1 * D2
    B1, W1, B2, W2 = T.T
    e = (D2 * ((m1 % D1) * B1 + (n1 % D1) * W1) + D1 * ((m2 % D2) * B2 + (n2 % D2) * W2)) % N
    return CycInt.from_counts(np.bincount(e, minlength=N), N)


def s_long_naive(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int,
                 cap: int | None = None) -> CycInt:
    """S(m1, m2, n1, n2; D1, D2) straight from the definition."""
    Gl3KloostermanArgs(m1, m2, n1, n2, D1, D2)
    return _s_long(m1, m2, n1, n2, D1, D2, cap)


def s_long_brute(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int,
                 rng: random.Random | None = None, spread: int = 0) -> CycInt:
    """Plain quadruple loop over (B1, C1, B2, C2), independent of the cached tables.

    ``Y_i, Z_i`` are found by searching all residues.  With ``rng`` given, each
    residue class gets a random integer representative shifted by up to
    ``spread`` multiples of its modulus, and every term picks a random
    solution ``(Y_i, Z_i)`` (also randomly shifted).
    """
    N = D1 * D2

    def reps(D):
        if rng is None:
            return list(range(D))
        return [r + D * rng.randint(-spread, spread) for r in range(D)]

    def solutions(B, C, D):
        return [(y, z) for y in range(D) for z in range(D) if (y * B + z * C - 1) % D == 0]

    counts = [0] * N
    rb1, rc1, rb2, rc2 = reps(D1), reps(D1), reps(D2), reps(D2)
    for B1 in rb1:
        for C1 in rc1:
            if math.gcd(math.gcd(B1, C1), D1) != 1:
                continue
            sol1 = solutions(B1, C1, D1)
            for B2 in rb2:
                for C2 in rc2:
                    if math.gcd(math.gcd(B2, C2), D2) != 1:
                        continue
                    if (D1 * C2 + B1 * B2 + C1 * D2) % N:
                        continue
                    sol2 = solutions(B2, C2, D2)
                    if rng is None:
                        (Y1, Z1), (Y2, Z2) = sol1[0], sol2[0]
                    else:
                        Y1, Z1 = rng.choice(sol1)
                        Y2, Z2 = rng.choice(sol2)
                        Y1 += D1 * rng.randint(-spread, spread)
                        Z2 += D2 * rng.randint(-spread, spread)
                    e = D2 * (m1 * B1 + n1 * (Y1 * D2 - Z1 * B2)) \
                        + D1 * (m2 * B2 + n2 * (Y2 * D1 - Z2 * B1))
                    counts[e % N] += 1
    return CycInt.from_counts(counts, N)


def well_definedness_check(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int,
                           trials: int = 20, seed: int = 0,
                           cap: int | None = None) -> bool:
    """Re-evaluate with random representatives and random (Y, Z) choices.

    True iff every trial agrees exactly with :func:`s_long_naive`.
    """
    reference = s_long_naive(m1, m2, n1, n2, D1, D2, cap=cap)
    rng = random.Random(seed)
    return all(
        s_long_brute(m1, m2, n1, n2, D1, D2, rng=rng, spread=3) == reference
        for _ in range(trials)
    )


# ---------------------------------------------------------------------------
# factorizations and closed forms


def factor_coprime(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int
                   ) -> tuple[CycInt, CycInt]:
    """The pair ``S(D2*m1, n1; D1)``, ``S(D1*m2, n2; D2)`` whose product is S."""
    if math.gcd(D1, D2) != 1:
        raise ModuliNotCoprime(f"gcd({D1}, {D2}) > 1")
    return (classical_kloosterman(D2 * m1, n1, D1),
            classical_kloosterman(D1 * m2, n2, D2))


def _twist(m1: int, m2: int, n1: int, n2: int, C1: int, C2: int, E1: int, E2: int
           ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split (C1*E1, C2*E2) with (C1*C2, E1*E2) = 1 into two twisted argument lists."""
    on_c = (_inv(E1, C1) ** 2 * E2 * m1 % C1 or C1, _inv(E2, C2) ** 2 * E1 * m2 % C2 or C2,
            n1, n2, C1, C2)
    on_e = (_inv(C1, E1) ** 2 * C2 * m1 % E1 or E1, _inv(C2, E2) ** 2 * C1 * m2 % E2 or E2,
            n1, n2, E1, E2)
    return on_c, on_e


def twisted_factor(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int,
                   decomposition: ModuliDecomposition | None = None,
                   cap: int | None = None) -> tuple[CycInt, CycInt]:
    """Factor S over the (E1, E2) and (g1, g2) blocks of the moduli decomposition.

    Returns ``(S(g1bar^2 g2 m1, g2bar^2 g1 m2, n1, n2, E1, E2),
    S(E1bar^2 E2 m1, E2bar^2 E1 m2, n1, n2, g1, g2))``.
    """
    dec = decompose_moduli(D1, D2) if decomposition is None else decomposition
    if not dec.is_valid() or (dec.D1, dec.D2) != (D1, D2):
        raise InvalidDecomposition(f"{dec} does not decompose ({D1}, {D2})")
    on_g, on_e = _twist(m1, m2, n1, n2, dec.g1, dec.g2, dec.E1, dec.E2)
    return _s_long(*on_e, cap=cap), _s_long(*on_g, cap=cap)


def s_prime_primepower(m1: int, m2: int, n1: int, n2: int, p: int, l: int) -> CycInt:
    """S(m1, m2, n1, n2; p, p^l) via the three-term prime by prime-power formula."""
    if l < 1:
        raise InvalidArguments("l must be >= 1")
    pl = p**l
    out = classical_kloosterman(n1, 0, p) * classical_kloosterman(m2, n2 * p, pl)
    out = out + classical_kloosterman(m1, 0, p) * classical_kloosterman(n2, m2 * p, pl)
    if l == 1:
        out = out + (p - 1)
    return out


def _block(m1: int, m2: int, n1: int, n2: int, p: int, k: int, l: int,
           cap: int | None) -> CycInt:
    if k == 0 and l == 0:
        return CycInt(1)
    if k == 0:
        return classical_kloosterman(m2, n2, p**l)
    if l == 0:
        return classical_kloosterman(m1, n1, p**k)
    if k == 1:
        return s_prime_primepower(m1, m2, n1, n2, p, l)
    if l == 1:
        # S(m1, m2, n1, n2, D1, D2) = S(m2, m1, n2, n1, D2, D1)
        return s_prime_primepower(m2, m1, n2, n1, p, k)
    return _s_long(m1, m2, n1, n2, p**k, p**l, cap)


def _s_fast(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int,
            cap: int | None) -> CycInt:
    primes = factorize(D1 * D2).primes
    if not primes:
        return CycInt(1)
    p = primes[0]
    C1, C2 = p ** _val(D1, p), p ** _val(D2, p)
    E1, E2 = D1 // C1, D2 // C2
    on_c, on_e = _twist(m1, m2, n1, n2, C1, C2, E1, E2)
    head = _block(on_c[0], on_c[1], n1, n2, p, _val(D1, p), _val(D2, p), cap)
    if head.is_zero() or E1 * E2 == 1:
        return head
    return mul(head, _s_fast(*on_e, cap=cap))


def s_long_fast(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int,
                cap: int | None = None) -> CycInt:
    """Structured evaluation: split into prime blocks, closed forms where known.

    Blocks ``(p^k, p^l)`` with ``k, l >= 2`` fall back to enumeration at
    prime-power scale.
    """
    Gl3KloostermanArgs(m1, m2, n1, n2, D1, D2)
    return _s_fast(m1, m2, n1, n2, D1, D2, cap)


def decompose_moduli(D1: int, D2: int) -> ModuliDecomposition:
    if D1 < 1 or D2 < 1:
        raise InvalidArguments("moduli must be positive")
    q = h1 = h2 = E1 = E2 = 1
    for p in factorize(D1 * D2).primes:
        a, b = _val(D1, p), _val(D2, p)
        if b == 0:
            E1 *= p**a
        elif a == 0:
            E2 *= p**b
        elif a == b == 1:
            q *= p
        else:
            h1 *= p**a
            h2 *= p**b
    return ModuliDecomposition(q, h1, h2, E1, E2)


def split_h(h1: int, h2: int) -> dict[str, tuple[int, int]]:
    """Split (h1, h2) into the (j, k, l) parts by which side carries the square.

    ``j``: primes with ``nu(h1) = 1``; ``k``: primes with ``nu(h2) = 1``;
    ``l``: both exponents at least 2.  Values are ``(part of h1, part of h2)``.
    """
    dec = ModuliDecomposition(1, h1, h2, 1, 1)
    if not dec.is_valid():
        raise InvalidDecomposition(f"({h1}, {h2}) is not an admissible h-pair")
    parts = {"j": [1, 1], "k": [1, 1], "l": [1, 1]}
    for p in factorize(h1 * h2).primes:
        a, b = _val(h1, p), _val(h2, p)
        key = "j" if a == 1 else "k" if b == 1 else "l"
        parts[key][0] *= p**a
        parts[key][1] *= p**b
    return {key: tuple(v) for key, v in parts.items()}


# ---------------------------------------------------------------------------
# identity checks


def symmetry_identities(x: int, a: int, y: int, D1: int, D2: int,
                        cap: int | None = None) -> dict[str, bool]:
    """Check the unit-shuffling identities used for the R' duality.

    ``S(a, y, x, 1, D1, D2) = S(x, 1, a, y, D1, D2) = S(1, x, y, a, D2, D1)``
    and ``S(1, x, y, a, D2, D1) = S(1, a*x, y, 1, D2, D1)``, plus
    ``S(a, y, x, 1, D1, D2) = S(1, y, a*x, 1, D1, D2)``.  Both
    moving-unit identities need ``(a, D1) = 1``: after the moduli are
    reversed, ``a`` sits in a slot taken modulo ``D1``.
    """
    s = lambda *args: _s_long(*args, cap=cap)  # noqa: E731
    base = s(a, y, x, 1, D1, D2)
    swapped = s(1, x, y, a, D2, D1)
    out = {
        "transpose": base == s(x, 1, a, y, D1, D2),
        "reverse_moduli": base == swapped,
    }
    if math.gcd(a, D1) == 1:
        out["move_unit_first"] = base == s(1, y, a * x, 1, D1, D2)
        out["move_unit_last"] = swapped == s(1, a * x, y, 1, D2, D1)
    return out


def complete_sum_identity_check(n1: int, n2: int, D1: int, M: int) -> bool:
    """sum_{D2 <= M*D1} S(n1, D2; D1) S(n2, D2; D1) == M*D1 * c_{D1}(n1 - n2).

    The left side is expanded into a single exponent histogram over
    ``(D2, x, y)`` so it is evaluated exactly without per-term products.
    """
    if D1 < 1 or M < 1:
        raise InvalidArguments("need D1 >= 1 and M >= 1")
    x, xb = units(D1), _inverses(D1)
    if D1 == 1:
        x = xb = np.zeros(1, dtype=np.int64)
    d2 = np.arange(1, M * D1 + 1, dtype=np.int64)[:, None, None]
    e = (n1 * x[:, None] + n2 * x[None, :] + d2 * (xb[:, None] + xb[None, :])) % D1
    lhs = CycInt.from_counts(np.bincount(e.ravel(), minlength=D1), D1)
    return lhs == ramanujan_sum(n1 - n2, D1) * (M * D1)


def weil_ratio(m1: int, m2: int, n1: int, n2: int, D1: int, D2: int,
               cap: int | None = None) -> float:
    """|S| over the Weil-type majorant without the epsilon power."""
    s = abs(s_long_naive(m1, m2, n1, n2, D1, D2, cap).to_complex())
    L = math.lcm(D1, D2)
    bound = math.sqrt(D1 * D2) * math.sqrt(
        math.gcd(D1, D2) * math.gcd(m1 * n2, L) * math.gcd(m2 * n1, L))
    return s / bound
