"""Modular arithmetic, factorization and classical Kloosterman sums."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .cyclotomic import CycInt
from .errors import ModuliNotCoprime, NotInvertible


@dataclass(frozen=True)
class ResidueClass:
    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "value", self.value % self.modulus)

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"bad factor list {self.factors}")
            last = p
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factors multiply to {prod}, not {self.value}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def exponent(self, p: int) -> int:
        return dict(self.factors).get(p, 0)


@lru_cache(maxsize=4096)
def factorize(n: int) -> Factorization:
    """Trial-division factorization of a positive integer."""
    if n < 1:
        raise ValueError("n must be positive")
    m = n
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return Factorization(n, tuple(out))


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n).factors == ((n, 1),)


def prime_power(n: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` if ``n == p**k`` with ``k >= 1``, ``(1, 0)`` for 1, else None."""
    if n == 1:
        return (1, 0)
    f = factorize(n).factors
    return f[0] if len(f) == 1 else None


def divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorize(n).factors:
        out = [d * p**i for d in out for i in range(e + 1)]
    return sorted(out)


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n).factors)


def mod_inverse(a: int, m: int) -> int:
    """Inverse of ``a`` modulo ``m`` in ``[0, m)``."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return 0
    if math.gcd(a, m) != 1:
        raise NotInvertible(f"{a} is not invertible mod {m}")
    return pow(a, -1, m)


def nu_p(t: int | ResidueClass, p: int) -> int:
    """p-adic valuation; on ``Z/p^k`` it is capped at ``k`` (so ``nu(0) = k``)."""
    if isinstance(t, ResidueClass):
        pk = prime_power(t.modulus)
        if pk is None or (t.modulus > 1 and pk[0] != p):
            raise ValueError(f"modulus {t.modulus} is not a power of {p}")
        k = pk[1]
        v = t.value
        j = 0
        while j < k and v % p == 0:
            v //= p
            j += 1
        return k if t.value == 0 else j
    if t == 0:
        raise ValueError("valuation of 0 is infinite")
    j = 0
    while t % p == 0:
        t //= p
        j += 1
    return j


def crt_combine(residues: Iterable[ResidueClass]) -> ResidueClass:
    x, m = 0, 1
    for r in residues:
        if math.gcd(m, r.modulus) != 1:
            raise ModuliNotCoprime(f"{m} and {r.modulus} share a factor")
        # x + m*s = r.value (mod r.modulus)
        s = (r.value - x) * mod_inverse(m, r.modulus) % r.modulus
        x += m * s
        m *= r.modulus
    return ResidueClass(x, m)


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n).factors:
        out = out // p * (p - 1)
    return out


@lru_cache(maxsize=4096)
def units(c: int) -> np.ndarray:
    """Reduced residues mod ``c`` (``[0]`` when ``c == 1``)."""
    r = np.arange(c, dtype=np.int64)
    g = np.gcd(r, c)
    out = r[g == 1]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=4096)
def _inverses(c: int) -> np.ndarray:
    u = units(c)
    inv = np.array([mod_inverse(int(x), c) for x in u], dtype=np.int64)
    inv.setflags(write=False)
    return inv


def classical_kloosterman(m: int, n: int, c: int) -> CycInt:
    """S(m, n; c) = sum over x coprime to c of e((m x + n xbar)/c)."""
    if c < 1:
        raise ValueError("c must be positive")
    x = units(c)
    exps = (m * x + n * _inverses(c)) % c
    return CycInt.from_counts(np.bincount(exps, minlength=c), c)


def ramanujan_sum(n: int, c: int) -> CycInt:
    """c_c(n) = S(n, 0; c), computed by exact summation."""
    return classical_kloosterman(n, 0, c)


def classical_multiplicativity_check(m: int, n: int, c1: int, c2: int) -> bool:
    """S(m, n; c1 c2) == S(m c2bar, n c2bar; c1) S(m c1bar, n c1bar; c2) for (c1, c2) = 1."""
    if math.gcd(c1, c2) != 1:
        raise ModuliNotCoprime(f"gcd({c1}, {c2}) > 1")
    i1, i2 = mod_inverse(c1, c2), mod_inverse(c2, c1)
    rhs = classical_kloosterman(m * i2, n * i2, c1) * classical_kloosterman(m * i1, n * i1, c2)
    return classical_kloosterman(m, n, c1 * c2) == rhs


def same_prime_support_count(q: int, x: int) -> int:
    """Number of n <= x whose set of prime divisors equals that of q."""
    primes = factorize(q).primes

    def count(i: int, bound: int) -> int:
        if i == len(primes):
            return 1
        p = primes[i]
        total = 0
        pe = p
        while pe <= bound:
            total += count(i + 1, bound // pe)
            pe *= p
        return total

    return count(0, x) if x >= 1 else 0
