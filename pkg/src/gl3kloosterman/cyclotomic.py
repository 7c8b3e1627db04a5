"""Exact arithmetic in the cyclotomic integers Z[zeta_N].

An element is stored as an integer vector ``c`` of length ``N`` standing for
``sum_j c[j] * zeta_N**j``.  The vector is always brought to a canonical form:

* For a prime power ``q = p**e`` the relation
  ``sum_{i<p} zeta_q**(low + i*q/p) = 0`` eliminates every exponent whose
  leading base-``p`` digit is ``p - 1``.
* For general ``N`` the exponent ``j`` is identified with its CRT coordinates
  ``(j mod q_1, ..., j mod q_r)`` over the prime-power factors of ``N`` and
  the prime-power rule is applied along each tensor axis.
* Finally the order is lowered while every surviving exponent is divisible by
  some prime ``p | N`` (the element then lives in ``Z[zeta_{N/p}]``).

Two values are equal as algebraic numbers iff their (order, vector) pairs
coincide, so equality and hashing are exact.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import OrderOverflow

DEFAULT_ORDER_CAP = 10**5

# coefficient bound below which int64 accumulation is safe
_INT64_SAFE = 2**62


def _prime_powers(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


@lru_cache(maxsize=512)
def _layout(n: int) -> tuple[np.ndarray, tuple[int, ...], tuple[tuple[int, int], ...]]:
    """Permutation from exponents to the C-ordered CRT tensor, and its shape."""
    pp = _prime_powers(n)
    shape = tuple(p**e for p, e in pp) or (1,)
    j = np.arange(n, dtype=np.int64)
    flat = np.zeros(n, dtype=np.int64)
    for q in shape:
        flat = flat * q + j % q
    flat.setflags(write=False)
    return flat, shape, tuple(pp)


def _canonical_vector(c: np.ndarray, n: int) -> np.ndarray:
    if n == 1:
        return c
    perm, shape, pp = _layout(n)
    t = np.zeros(n, dtype=c.dtype)
    t[perm] = c
    t = t.reshape(shape)
    for axis, (p, e) in enumerate(pp):
        q = p**e
        low = q // p
        split = t.shape[:axis] + (p, low) + t.shape[axis + 1:]
        u = t.reshape(split)
        top = np.take(u, [p - 1], axis=axis)
        idx = [slice(None)] * u.ndim
        idx[axis] = slice(0, p - 1)
        u[tuple(idx)] -= top
        idx[axis] = p - 1
        u[tuple(idx)] = 0
        t = u.reshape(t.shape)
    return t.reshape(n)[perm]


def _normalize(c: np.ndarray, n: int) -> tuple[int, np.ndarray]:
    c = _canonical_vector(c, n)
    while n > 1:
        nz = np.flatnonzero(c)
        if nz.size == 0:
            return 1, np.zeros(1, dtype=c.dtype)
        for p, _ in _layout(n)[2]:
            if not np.any(nz % p):
                n //= p
                c = _canonical_vector(c[::p].copy(), n)
                break
        else:
            break
    return n, c


def _as_int64_if_safe(c: np.ndarray) -> np.ndarray:
    if c.dtype == object:
        if c.size == 0 or max(abs(int(v)) for v in c) < _INT64_SAFE:
            return c.astype(np.int64)
    return c


class CycInt:
    """An element of Z[zeta_N] in canonical form (immutable).

    Build values with :func:`root_of_unity`, :meth:`from_counts` or by mixing
    with Python integers; ``CycInt(5)`` is the rational integer 5.
    """

    __slots__ = ("_order", "_coeffs", "_hash")

    def __init__(self, value: int = 0):
        self._set(1, np.array([int(value)], dtype=np.int64))

    def _set(self, order: int, coeffs: np.ndarray) -> None:
        coeffs = _as_int64_if_safe(coeffs)
        coeffs.setflags(write=False)
        self._order = order
        self._coeffs = coeffs
        self._hash = None

    @classmethod
    def from_counts(cls, counts: Iterable[int] | np.ndarray, order: int,
                    cap: int = DEFAULT_ORDER_CAP) -> CycInt:
        """Element ``sum_j counts[j] zeta_order**j`` (counts taken mod ``order``)."""
        if order < 1:
            raise ValueError("order must be positive")
        if order > cap:
            raise OrderOverflow(f"order {order} exceeds cap {cap}")
        c = np.asarray(counts)
        if c.dtype != object:
            c = c.astype(np.int64)
        if c.shape[0] != order:
            full = np.zeros(order, dtype=c.dtype)
            np.add.at(full, np.arange(c.shape[0]) % order, c)
            c = full
        n, c = _normalize(c.copy(), order)
        out = cls.__new__(cls)
        out._set(n, c)
        return out

    @property
    def order(self) -> int:
        """Minimal N with the value in Z[zeta_N] (after canonical reduction)."""
        return self._order

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    def lifted(self, order: int) -> np.ndarray:
        """Coefficient vector (not re-canonicalized) at a multiple of the order."""
        if order % self._order:
            raise ValueError(f"{order} is not a multiple of {self._order}")
        out = np.zeros(order, dtype=self._coeffs.dtype)
        out[:: order // self._order] = self._coeffs
        return out

    def is_zero(self) -> bool:
        return self._order == 1 and int(self._coeffs[0]) == 0

    def is_rational(self) -> bool:
        return self._order == 1

    def __int__(self) -> int:
        if self._order != 1:
            raise ValueError(f"{self!r} is not a rational integer")
        return int(self._coeffs[0])

    def to_complex(self) -> complex:
        nz = np.flatnonzero(self._coeffs)
        if nz.size == 0:
            return 0j
        w = np.exp(2j * np.pi * nz / self._order)
        return complex(np.dot(self._coeffs[nz].astype(float), w))

    __complex__ = to_complex

    def _coerce(self, other) -> CycInt | None:
        if isinstance(other, CycInt):
            return other
        if isinstance(other, (int, np.integer)):
            return CycInt(int(other))
        return None

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._order == other._order and np.array_equal(self._coeffs, other._coeffs)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._order, tuple(int(v) for v in self._coeffs)))
        return self._hash

    def __add__(self, other) -> CycInt:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> CycInt:
        out = CycInt.__new__(CycInt)
        out._set(self._order, -self._coeffs)
        return out

    def __sub__(self, other) -> CycInt:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other) -> CycInt:
        return (-self).__add__(other)

    def __mul__(self, other) -> CycInt:
        if isinstance(other, (int, np.integer)):
            out = CycInt.__new__(CycInt)
            if other == 0:
                out._set(1, np.zeros(1, dtype=np.int64))
            else:
                out._set(self._order, self._coeffs.astype(object) * int(other))
            return out
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return mul(self, other)

    __rmul__ = __mul__

    def exact_div(self, k: int) -> CycInt:
        """Divide by a rational integer, requiring exact divisibility."""
        c = self._coeffs.astype(object)
        if any(int(v) % k for v in c):
            raise ValueError(f"{self!r} is not divisible by {k}")
        out = CycInt.__new__(CycInt)
        out._set(self._order, np.array([int(v) // k for v in c], dtype=object))
        return out

    def __repr__(self) -> str:
        if self._order == 1:
            return f"CycInt({int(self._coeffs[0])})"
        terms = [f"{int(v)}*z^{j}" for j, v in enumerate(self._coeffs) if v]
        return f"CycInt[N={self._order}]({' + '.join(terms)})"

    def to_dict(self) -> dict:
        """Sparse JSON-friendly form ``{"order": N, "coeffs": {exp: coeff}}``."""
        return {
            "order": self._order,
            "coeffs": {str(j): int(v) for j, v in enumerate(self._coeffs) if v},
        }


def root_of_unity(a: int, n: int) -> CycInt:
    """e(a/n) as an exact cyclotomic integer."""
    if n < 1:
        raise ValueError("n must be positive")
    c = np.zeros(n, dtype=np.int64)
    c[a % n] = 1
    return CycInt.from_counts(c, n, cap=max(n, DEFAULT_ORDER_CAP))


def _common_order(x: CycInt, y: CycInt, cap: int) -> int:
    n = math.lcm(x.order, y.order)
    if n > cap:
        raise OrderOverflow(f"lcm order {n} exceeds cap {cap}")
    return n


def add(x: CycInt, y: CycInt, cap: int = DEFAULT_ORDER_CAP) -> CycInt:
    n = _common_order(x, y, cap)
    cx, cy = x.lifted(n), y.lifted(n)
    if cx.dtype == object or cy.dtype == object:
        cx, cy = cx.astype(object), cy.astype(object)
    return CycInt.from_counts(cx + cy, n, cap=cap)


def mul(x: CycInt, y: CycInt, cap: int = DEFAULT_ORDER_CAP) -> CycInt:
    n = _common_order(x, y, cap)
    cx, cy = x.lifted(n), y.lifted(n)
    ix, iy = np.flatnonzero(cx), np.flatnonzero(cy)
    if ix.size == 0 or iy.size == 0:
        return CycInt(0)
    big = (
        cx.dtype == object or cy.dtype == object
        or int(np.abs(cx).max()) * int(np.abs(cy).max()) * min(ix.size, iy.size) >= _INT64_SAFE
    )
    dtype = object if big else np.int64
    out = np.zeros(n, dtype=dtype)
    idx = (ix[:, None] + iy[None, :]) % n
    vals = np.outer(cx[ix].astype(dtype), cy[iy].astype(dtype))
    np.add.at(out, idx.ravel(), vals.ravel())
    return CycInt.from_counts(out, n, cap=cap)


def is_zero(x: CycInt) -> bool:
    return x.is_zero()


def eq(x: CycInt, y: CycInt) -> bool:
    return x == y


def to_complex(x: CycInt) -> complex:
    return x.to_complex()


def cyc_sum(values: Iterable[CycInt], cap: int = DEFAULT_ORDER_CAP) -> CycInt:
    """Sum many values with a single canonicalization."""
    values = list(values)
    if not values:
        return CycInt(0)
    n = 1
    for v in values:
        n = math.lcm(n, v.order)
    if n > cap:
        raise OrderOverflow(f"lcm order {n} exceeds cap {cap}")
    acc = np.zeros(n, dtype=object)
    for v in values:
        acc[:: n // v.order] += v.coeffs.astype(object)
    return CycInt.from_counts(acc, n, cap=cap)
