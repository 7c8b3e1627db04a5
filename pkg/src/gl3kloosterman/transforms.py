"""Partial Fourier transform of the GL(3) Kloosterman sum and the majorant R.

``Shat(a, u, t, b, D1, D2)`` is the normalized transform of
``(y, x) -> S(a, y, x, b, D1, D2)`` at the frequency pair ``(u, t)``.  By
orthogonality it collapses to a plain sum over the valid tuples with
``W1 = t (mod D1)`` and ``B2 = u (mod D2)`` of ``e(a*B1/D1 + b*W2/D2)``, so it
is itself a cyclotomic integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import ResidueClass, classical_kloosterman, divisors, mod_inverse, nu_p, prime_power, units
from .cyclotomic import CycInt, cyc_sum, root_of_unity
from .errors import CoprimalityViolated, ModuliNotCoprime, NotPrimePower
from .gl3_sums import _check_cap, _s_long, _tuples


@dataclass(frozen=True)
class ShatArgs:
    a: int
    u: int
    t: int
    b: int
    D1: int
    D2: int

    def __post_init__(self):
        if self.D1 < 1 or self.D2 < 1:
            raise ValueError("moduli must be positive")
        if math.gcd(self.a, self.D1) != 1 or math.gcd(self.b, self.D2) != 1:
            raise CoprimalityViolated(
                f"need (a, D1) = (b, D2) = 1, got a={self.a}, b={self.b}, D=({self.D1}, {self.D2})")


@dataclass(frozen=True)
class RValue:
    t: int
    D1: int
    D2: int
    value: float
    dual: bool = False  # True for R'(u, D1, D2); then ``t`` holds u


def _inv(a: int, m: int) -> int:
    return mod_inverse(a, m) if m > 1 else 0


@lru_cache(maxsize=512)
def _bucketed(D1: int, D2: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tuples sorted by bucket ``t*D2 + u`` with bucket start offsets."""
    T = _tuples(D1, D2)
    key = T[:, 1] * D2 + T[:, 2]
    order = np.argsort(key, kind="stable")
    starts = np.searchsorted(key[order], np.arange(D1 * D2 + 1))
    B1, W2 = T[order, 0], T[order, 3]
    for arr in (B1, W2, starts):
        arr.setflags(write=False)
    return B1, W2, starts


def _bucket(D1: int, D2: int, t: int, u: int) -> tuple[np.ndarray, np.ndarray]:
    B1, W2, starts = _bucketed(D1, D2)
    k = (t % D1) * D2 + (u % D2)
    return B1[starts[k]:starts[k + 1]], W2[starts[k]:starts[k + 1]]


def shat_naive(a: int, u: int, t: int, b: int, D1: int, D2: int,
               cap: int | None = None) -> CycInt:
    """Shat from the definition, collapsed by orthogonality over (x, y)."""
    ShatArgs(a, u, t, b, D1, D2)
    _check_cap(D1, D2, cap)
    B1, W2 = _bucket(D1, D2, t, u)
    N = D1 * D2
    e = (a * D2 * B1 + b * D1 * W2) % N
    return CycInt.from_counts(np.bincount(e, minlength=N), N)


def shat_literal(a: int, u: int, t: int, b: int, D1: int, D2: int,
                 cap: int | None = None) -> CycInt:
    """Shat as the literal normalized double sum of S-values over (x, y).

    Uses the GL(3) evaluator as a black box; only meant for small moduli.
    """
    ShatArgs(a, u, t, b, D1, D2)
    N = D1 * D2
    terms = []
    for x in range(D1):
        for y in range(D2):
            s = _s_long(a, y, x, b, D1, D2, cap)
            terms.append(s * root_of_unity(-(x * t * D2 + y * u * D1), N))
    return cyc_sum(terms).exact_div(N)


def fourier_inversion(a: int, m: int, n: int, b: int, D1: int, D2: int,
                      cap: int | None = None) -> CycInt:
    """Rebuild S(a, m, n, b, D1, D2) from its transform."""
    N = D1 * D2
    terms = [
        root_of_unity(t * n * D2 + u * m * D1, N) * shat_naive(a, u, t, b, D1, D2, cap)
        for t in range(D1)
        for u in range(D2)
    ]
    return cyc_sum(terms)


# ---------------------------------------------------------------------------
# closed forms at prime-power moduli


def _prime_power_pair(D1: int, D2: int) -> tuple[int, int, int]:
    pk1, pk2 = prime_power(D1), prime_power(D2)
    if pk1 is None or pk2 is None:
        raise NotPrimePower(f"({D1}, {D2}) are not powers of one prime")
    p1, k = pk1
    p2, l = pk2
    if k and l and p1 != p2:
        raise NotPrimePower(f"({D1}, {D2}) are powers of different primes")
    p = p1 if k else p2
    return p, k, l


def _nu(x: int, p: int, k: int) -> int:
    return nu_p(ResidueClass(x, p**k), p) if k else 0


def _unequal_exponents(a: int, u: int, t: int, b: int, p: int, k: int, l: int) -> CycInt:
    """Case l > k >= 2."""
    nu = _nu(t, p, k)
    if 2 * nu > k or _nu(u, p, l) != nu:
        return CycInt(0)
    pn = p**nu
    t1 = (t % p**k) // pn
    u1 = (u % p**l) // pn
    m1 = p ** (l - k + nu)
    out = root_of_unity(b * _inv(u1, m1), m1) * root_of_unity(a * _inv(t1, pn) * p ** (l - k), pn)
    out = out * classical_kloosterman(a, b * _inv(t1 * u1, pn), pn)
    return out * pn


def shat_closed_form(a: int, u: int, t: int, b: int, D1: int, D2: int) -> CycInt | None:
    """Closed-form Shat for ``D1 = p^k``, ``D2 = p^l``.

    Returns None in the case ``k = l >= 2`` where no closed form is known
    (see :func:`v_decomposition`).
    """
    ShatArgs(a, u, t, b, D1, D2)
    p, k, l = _prime_power_pair(D1, D2)
    if k == 0 and l == 0:
        return CycInt(1)
    if k == 0:
        if u % p == 0:
            return CycInt(0)
        return root_of_unity(_inv(u, D2) * b, D2)
    if l == 0:
        if t % p == 0:
            return CycInt(0)
        return root_of_unity(_inv(t, D1) * a, D1)
    if k == l == 1:
        if t % p and u % p:
            return CycInt(1)
        if t % p == 0 and u % p == 0:
            return CycInt(p)
        return CycInt(0)
    if k == l:
        return None
    if k == 1:
        if t % p == 0 or u % p == 0:
            return CycInt(0)
        return root_of_unity(_inv(u, D2) * b * p, D2)
    if l == 1:
        if t % p == 0 or u % p == 0:
            return CycInt(0)
        return root_of_unity(_inv(t, D1) * a * p, D1)
    if l > k:
        return _unequal_exponents(a, u, t, b, p, k, l)
    # k > l >= 2: reverse the moduli
    return _unequal_exponents(b, t, u, a, p, l, k)


@lru_cache(maxsize=64)
def _nu_table(p: int, k: int) -> np.ndarray:
    out = np.array([_nu(x, p, k) for x in range(p**k)], dtype=np.int64)
    out.setflags(write=False)
    return out


def v_decomposition(a: int, u: int, t: int, b: int, p: int, k: int,
                    cap: int | None = None) -> list[CycInt]:
    """Split Shat(a, u, t, b, p^k, p^k) by the exact power of p dividing B1.

    Entry ``k1`` is the subsum over tuples with ``nu_p(B1 mod p^k) = k1``.
    """
    D = p**k
    ShatArgs(a, u, t, b, D, D)
    _check_cap(D, D, cap)
    B1, W2 = _bucket(D, D, t, u)
    nus = _nu_table(p, k)[B1]
    N = D * D
    out = []
    for k1 in range(k + 1):
        sel = nus == k1
        e = (a * D * B1[sel] + b * D * W2[sel]) % N
        out.append(CycInt.from_counts(np.bincount(e, minlength=N), N))
    return out


# ---------------------------------------------------------------------------
# identities


def shat_factorization_check(a: int, u: int, t: int, C1: int, E1: int, C2: int, E2: int,
                             cap: int | None = None) -> bool:
    """Check the CRT splitting of Shat(a, u, t, 1, C1*E1, C2*E2)."""
    if math.gcd(C1 * C2, E1 * E2) != 1:
        raise ModuliNotCoprime(f"({C1}, {C2}) and ({E1}, {E2}) share a prime")
    lhs = shat_naive(a, u, t, 1, C1 * E1, C2 * E2, cap)
    first = shat_naive(
        _inv(E1, C1) ** 2 * E2 * a % C1 or 1,
        u * E2 * _inv(E1, C2),
        t * _inv(E1, C1),
        1, C1, C2, cap)
    second = shat_naive(
        _inv(C1, E1) ** 2 * C2 * a % E1 or 1,
        u * C2 * _inv(C1, E2),
        t * _inv(C1, E1),
        1, E1, E2, cap)
    return lhs == first * second


def reverse_moduli_check(a: int, u: int, t: int, b: int, D1: int, D2: int,
                         cap: int | None = None) -> bool:
    return shat_naive(a, u, t, b, D1, D2, cap) == shat_naive(b, t, u, a, D2, D1, cap)


# ---------------------------------------------------------------------------
# the majorants R and R'


@lru_cache(maxsize=128)
def shat_table(D1: int, D2: int) -> np.ndarray:
    """Complex array ``F[a, u, t] = Shat(a, u, t, 1, D1, D2)`` for every residue a.

    Entries with ``(a, D1) > 1`` are meaningless and left in place; callers
    index with reduced residues only.
    """
    T = _tuples(D1, D2)
    B1, W1, B2, W2 = T.T
    G = np.zeros((D1, D2, D1), dtype=complex)
    np.add.at(G, (W1, B2, B1), np.exp(2j * np.pi * W2 / D2))
    # sum_B1 G[t, u, B1] e(a B1 / D1) for every a
    F = np.fft.ifft(G, axis=2) * D1
    F = np.transpose(F, (2, 1, 0))
    F.setflags(write=False)
    return F


def _r_both(t: int, D1: int, D2: int) -> tuple[float, float]:
    F = shat_table(D1, D2)
    us = units(D1)
    mass = np.abs(F).sum(axis=1)  # [a, t] summed over u
    tb = (us * t) % D1
    full = mass[np.ix_(us, tb)].max()
    alt = mass[1 % D1, tb].max()
    return float(full), float(alt)


def r_function(t: int, D1: int, D2: int, cap: int | None = None, tol: float = 1e-8) -> RValue:
    """R(t, D1, D2): max over units (a, b) of sum_u |Shat(a, u, b*t, 1, D1, D2)|.

    Also evaluates the single-unit form (a = 1) and raises AssertionError if
    the two disagree by more than ``tol``.
    """
    _check_cap(D1, D2, cap)
    full, alt = _r_both(t, D1, D2)
    if abs(full - alt) > tol:
        raise AssertionError(f"R forms disagree at t={t}, D=({D1}, {D2}): {full} vs {alt}")
    return RValue(t % D1, D1, D2, full)


def r_prime_function(u: int, D1: int, D2: int, cap: int | None = None,
                     tol: float = 1e-8) -> RValue:
    """R'(u, D1, D2): max over a mod D1, b mod D2 of sum_t |Shat(a, b*u, t, 1, D1, D2)|.

    Checked against R(u, D2, D1) within ``tol``.
    """
    _check_cap(D1, D2, cap)
    F = shat_table(D1, D2)
    mass = np.abs(F).sum(axis=2)  # [a, u] summed over t
    ub = (units(D2) * u) % D2
    value = float(mass[np.ix_(units(D1), ub)].max())
    other = r_function(u, D2, D1, cap, tol).value
    if abs(value - other) > tol:
        raise AssertionError(f"R' duality fails at u={u}, D=({D1}, {D2}): {value} vs {other}")
    return RValue(u % D2, D1, D2, value, dual=True)


def lemma10_bound(t: int, p: int, k: int, l: int) -> int:
    nu = _nu(t, p, k)
    bound = (k + 1) * p**l
    if 3 * nu <= 2 * min(k, l):
        bound += p ** (nu + l)
    return bound


def sharper_unequal_bound(t: int, p: int, k: int, l: int) -> float:
    """The k != l refinement: p^(nu/2 + l) restricted to nu <= min(k, l)/2."""
    nu = _nu(t, p, k)
    bound = float((k + 1) * p**l)
    if 2 * nu <= min(k, l):
        bound += p ** (nu / 2 + l)
    return bound


def corollary_divisor_sum(t: int, D1: int, D2: int) -> int:
    """sum of d over d | t with d^3 | gcd(D1, D2)^2 (all such d when t = 0)."""
    g2 = math.gcd(D1, D2) ** 2
    return sum(d for d in divisors(g2) if g2 % d**3 == 0 and (t % d == 0))


def rbound_check(p: int, k: int, l: int, cap: int | None = None) -> dict:
    """Check R(t, p^k, p^l) against its prime-power bound for every t mod p^k.

    The report also carries the observed constant for the divisor-sum form
    ``R <= C * D2 * sum_{d | t, d^3 | (D1, D2)^2} d`` and whether the sharper
    k != l variant held.
    """
    D1, D2 = p**k, p**l
    rows = []
    for t in range(D1):
        r = r_function(t, D1, D2, cap).value
        bound = lemma10_bound(t, p, k, l)
        row = {
            "t": t,
            "nu": _nu(t, p, k),
            "R": r,
            "bound": bound,
            "holds": r <= bound + 1e-8,
            "corollary_ratio": r / (D2 * corollary_divisor_sum(t, D1, D2)),
        }
        if k == 1 and l >= 2:
            row["sharp_k1_holds"] = r <= (p**l if t % p else 0) + 1e-8
        if k != l:
            row["sharper_variant_holds"] = r <= sharper_unequal_bound(t, p, k, l) + 1e-8
        rows.append(row)
    return {
        "p": p,
        "k": k,
        "l": l,
        "holds": all(r["holds"] and r.get("sharp_k1_holds", True) for r in rows),
        "corollary_constant": max(r["corollary_ratio"] for r in rows),
        "rows": rows,
    }
