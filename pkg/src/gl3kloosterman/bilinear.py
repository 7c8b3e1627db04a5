"""The bilinear form in GL(3) Kloosterman sums and bound-ratio experiments.

All aggregate quantities are complex doubles; individual Kloosterman sums are
evaluated exactly and converted once.  Epsilon powers in the bounds are set
to zero, so every reported ratio carries the implied constant.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from .arith import divisors, factorize, is_prime, is_squarefree, units
from .errors import CapExceeded, InvalidDivisors, InvalidHRange
from .gl3_sums import DEFAULT_NAIVE_CAP, _s_fast, _s_long, factor_coprime, naive_cost


class CoeffSeq:
    """Finitely supported complex coefficients.

    One-index sequences (alpha, beta) live on ``1 <= n <= bound``; ``gamma``
    sequences are indexed by pairs ``(D1, D2)`` with ``D1 <= X1``,
    ``D2 <= X2`` and must satisfy ``|gamma| <= 1``.
    """

    def __init__(self, entries: Mapping, bound, *, is_gamma: bool = False):
        self.is_gamma = is_gamma
        self.bound = tuple(bound) if is_gamma else int(bound)
        clean = {}
        for key, value in entries.items():
            if is_gamma:
                d1, d2 = (int(k) for k in key)
                if not (1 <= d1 <= self.bound[0] and 1 <= d2 <= self.bound[1]):
                    raise ValueError(f"gamma index {key} outside {self.bound}")
                if abs(value) > 1 + 1e-12:
                    raise ValueError(f"|gamma_{key}| = {abs(value)} exceeds 1")
                key = (d1, d2)
            else:
                key = int(key)
                if not 1 <= key <= self.bound:
                    raise ValueError(f"index {key} outside [1, {self.bound}]")
            if value != 0:
                clean[key] = complex(value)
        self.entries = clean

    @classmethod
    def from_array(cls, values) -> CoeffSeq:
        """alpha/beta from an array whose i-th entry is the coefficient of i+1."""
        values = np.asarray(values, dtype=complex)
        return cls({i + 1: v for i, v in enumerate(values)}, len(values))

    @classmethod
    def delta(cls, index, bound, *, is_gamma: bool = False) -> CoeffSeq:
        return cls({index: 1.0}, bound, is_gamma=is_gamma)

    def as_array(self, length: int | None = None) -> np.ndarray:
        n = self.bound if length is None else length
        out = np.zeros(n, dtype=complex)
        for i, v in self.entries.items():
            if i <= n:
                out[i - 1] = v
        return out

    def norm(self) -> float:
        return math.sqrt(sum(abs(v) ** 2 for v in self.entries.values()))

    @classmethod
    def read_csv(cls, path, bound=None, *, is_gamma: bool = False) -> CoeffSeq:
        """Load ``index,re,im`` rows (``d1,d2,re,im`` for gamma).

        Without ``bound`` the support bound is the largest index present.
        """
        keys = ("d1", "d2") if is_gamma else ("index",)
        entries = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = set(keys + ("re", "im")) - set(reader.fieldnames or ())
            if missing:
                raise ValueError(f"{path}: missing columns {sorted(missing)}")
            for row in reader:
                key = tuple(int(row[k]) for k in keys)
                entries[key if is_gamma else key[0]] = complex(float(row["re"]), float(row["im"]))
        if bound is None:
            if is_gamma:
                bound = (max((k[0] for k in entries), default=1), max((k[1] for k in entries), default=1))
            else:
                bound = max(entries, default=1)
        return cls(entries, bound, is_gamma=is_gamma)

    def write_csv(self, path) -> None:
        header = ["d1", "d2", "re", "im"] if self.is_gamma else ["index", "re", "im"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for key in sorted(self.entries):
                v = self.entries[key]
                idx = list(key) if self.is_gamma else [key]
                w.writerow(idx + [repr(v.real), repr(v.imag)])

    def __repr__(self) -> str:
        kind = "gamma" if self.is_gamma else "seq"
        return f"CoeffSeq[{kind}, bound={self.bound}, nnz={len(self.entries)}]"


@dataclass
class BoundReport:
    lhs: float
    rhs_components: dict[str, float]
    ratio: float
    grid: dict[str, int]
    extra: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        row = dict(self.grid)
        row["lhs"] = self.lhs
        row["ratio"] = self.ratio
        for k, v in self.rhs_components.items():
            row[f"rhs_{k}"] = v
        row.update(self.extra)
        return row


# ---------------------------------------------------------------------------
# Kloosterman kernel


@lru_cache(maxsize=2048)
def _residue_table(D1: int, D2: int, method: str, cap: int) -> np.ndarray:
    """R[y, x] = S(1, y, x, 1, D1, D2) for y mod D2, x mod D1 (complex)."""
    evaluate = _s_fast if method == "fast" else _s_long
    if method == "naive" and naive_cost(D1, D2) > cap:
        raise CapExceeded(f"naive kernel at ({D1}, {D2}) exceeds cap {cap}")
    out = np.empty((D2, D1), dtype=complex)
    for y in range(D2):
        for x in range(D1):
            # residue 0 is represented by the modulus so frequencies stay nonzero
            out[y, x] = evaluate(1, y or D2, x or D1, 1, D1, D2, cap).to_complex()
    out.setflags(write=False)
    return out


def kloosterman_matrix(D1: int, D2: int, N: int, signs: tuple[int, int] = (1, 1),
                       method: str = "fast", cap: int | None = None) -> np.ndarray:
    """K[m-1, n-1] = S(1, e1*m, e2*n, 1, D1, D2) for 1 <= m, n <= N."""
    cap = DEFAULT_NAIVE_CAP if cap is None else cap
    table = _residue_table(D1, D2, method, cap)
    idx = np.arange(1, N + 1)
    return table[np.ix_((signs[0] * idx) % D2, (signs[1] * idx) % D1)]


def _support_length(alpha: CoeffSeq, beta: CoeffSeq) -> int:
    return max([alpha.bound, beta.bound])


def inner_sums(alpha: CoeffSeq, beta: CoeffSeq, pairs, signs=(1, 1),
               method: str = "fast", cap: int | None = None) -> dict[tuple[int, int], complex]:
    """sum_{m,n} alpha_m beta_n S(1, e1*m, e2*n, 1, D1, D2) for each (D1, D2)."""
    N = _support_length(alpha, beta)
    a, b = alpha.as_array(N), beta.as_array(N)
    return {
        (D1, D2): complex(a @ kloosterman_matrix(D1, D2, N, signs, method, cap) @ b)
        for D1, D2 in pairs
    }


def bilinear_s(alpha: CoeffSeq, beta: CoeffSeq, gamma: CoeffSeq,
               signs: tuple[int, int] = (1, 1), method: str = "fast",
               cap: int | None = None) -> complex:
    """sum gamma_{D1,D2} alpha_m beta_n S(1, e1*m, e2*n, 1, D1, D2)."""
    inner = inner_sums(alpha, beta, sorted(gamma.entries), signs, method, cap)
    return complex(sum(g * inner[key] for key, g in gamma.entries.items()))


def adversarial_gamma(inner: Mapping[tuple[int, int], complex], X1: int, X2: int) -> CoeffSeq:
    """Unit-modulus gamma aligning every (D1, D2) term: |S| = sum |inner|."""
    entries = {k: (v.conjugate() / abs(v) if abs(v) > 1e-12 else 0.0) for k, v in inner.items()}
    return CoeffSeq(entries, (X1, X2), is_gamma=True)


# ---------------------------------------------------------------------------
# large-sieve quantities


def m_beta(beta: CoeffSeq, X1: int, X2: int, q_cap: int | None = None) -> float:
    """The arithmetic large-sieve quantity M(beta); with ``q_cap`` it is M*(beta)."""
    N = beta.bound
    b = beta.as_array()
    n = np.arange(1, N + 1)
    qmax = min(X1, X2) if q_cap is None else min(X1, X2, q_cap)
    total = 0.0
    for q in range(1, qmax + 1):
        gq = np.gcd(n, q)
        for d1 in divisors(q):
            restricted = np.where(gq == d1, b, 0)
            if not restricted.any():
                continue
            for c in range(1, X1 // q + 1):
                if math.gcd(c, q) != 1:
                    continue
                t = units(c) if c > 1 else np.array([0])
                phases = np.exp(2j * np.pi * np.outer(t, n) / c)
                total += d1 / q * float(np.sum(np.abs(phases @ restricted) ** 2))
    return total


def a_function(d1: int, d2: int, q: int) -> int:
    """Product of (p^2 - p + 1) over p | (d1, d2) and (p + 1) over p | q coprime to d1 d2."""
    if q < 1 or not is_squarefree(q) or q % d1 or q % d2:
        raise InvalidDivisors(f"need squarefree q with d1 | q, d2 | q; got ({d1}, {d2}, {q})")
    out = 1
    for p in factorize(q).primes:
        if d1 % p == 0 and d2 % p == 0:
            out *= p * p - p + 1
        elif d1 % p and d2 % p:
            out *= p + 1
    return out


def a_bound_ratio(d1: int, d2: int, q: int) -> float:
    """A(d1, d2, q) / (q * (d1, d2)^3 / (d1 d2))."""
    g = math.gcd(d1, d2)
    return a_function(d1, d2, q) / (q * g**3 / (d1 * d2))


# ---------------------------------------------------------------------------
# experiments


def random_sequence(rng: np.random.Generator, N: int, kind: str = "sign") -> CoeffSeq:
    if kind == "sign":
        values = rng.choice([-1.0, 1.0], size=N)
    elif kind == "phase":
        values = np.exp(2j * np.pi * rng.random(N))
    else:
        raise ValueError(f"unknown coefficient kind {kind!r}")
    return CoeffSeq.from_array(values)


def _all_pairs(X1: int, X2: int) -> list[tuple[int, int]]:
    return [(d1, d2) for d1 in range(1, X1 + 1) for d2 in range(1, X2 + 1)]


def _trial_sequences(N: int, seed: int, trials: int, kinds=("sign", "phase")):
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        kind = kinds[trial % len(kinds)]
        yield trial, kind, random_sequence(rng, N, kind), random_sequence(rng, N, kind)


def theorem2_denominator(m_alpha: float, m_beta_: float, X1: int, X2: int) -> float:
    return (X1 * X2) * math.sqrt(m_alpha * m_beta_)


def theorem3_first_term(m_alpha: float, m_beta_: float, X1: int, X2: int,
                        H1: int, H2: int) -> float:
    return (X1 * H2 + X2 * H1) * math.sqrt(m_alpha * m_beta_)


def _ratio(lhs: float, rhs: float) -> float:
    return lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)


def theorem2_experiment(N: int, X1: int, X2: int, trials: int, seed: int = 0,
                        cap: int | None = None) -> list[BoundReport]:
    """|S| with adversarial gamma against (X1 X2) M(alpha)^1/2 M(beta)^1/2.

    Also records the trivial (Weil-type) form (X1 X2)^{3/2} N ||alpha|| ||beta||,
    the large-sieve corollary form, and M/((X1^2 + N)||.||^2).
    """
    pairs = _all_pairs(X1, X2)
    out = []
    for trial, kind, alpha, beta in _trial_sequences(N, seed, trials):
        inner = inner_sums(alpha, beta, pairs, cap=cap)
        lhs = float(sum(abs(v) for v in inner.values()))
        ma, mb = m_beta(alpha, X1, X2), m_beta(beta, X1, X2)
        na, nb = alpha.norm(), beta.norm()
        denom = theorem2_denominator(ma, mb, X1, X2)
        weil = (X1 * X2) ** 1.5 * N * na * nb
        corollary = X1 * X2 * math.sqrt((X1**2 + N) * (X2**2 + N)) * na * nb
        out.append(BoundReport(
            lhs=lhs,
            rhs_components={"theorem2": denom, "weil": weil, "corollary1": corollary},
            ratio=_ratio(lhs, denom),
            grid={"N": N, "X1": X1, "X2": X2, "trial": trial},
            extra={
                "kind": kind,
                "M_alpha": ma,
                "M_beta": mb,
                "weil_ratio": _ratio(lhs, weil),
                "corollary1_ratio": _ratio(lhs, corollary),
                "large_sieve_ratio_beta": _ratio(mb, (X1**2 + N) * nb**2),
            },
        ))
    return out


def theorem3_experiment(N: int, X1: int, X2: int, H1: int, H2: int, trials: int,
                        seed: int = 0, cap: int | None = None) -> list[BoundReport]:
    """|S| against (X1 H2 + X2 H1) M*^1/2 M*^1/2 + (X1 X2)^{3/2} N ||a|| ||b|| (1/H1 + 1/H2)."""
    if not (1 <= H1 <= X1 and 1 <= H2 <= X2):
        raise InvalidHRange(f"need 1 <= H1 <= X1, 1 <= H2 <= X2; got H=({H1}, {H2}), X=({X1}, {X2})")
    pairs = _all_pairs(X1, X2)
    q_cap = min(H1, H2)
    out = []
    for trial, kind, alpha, beta in _trial_sequences(N, seed, trials):
        inner = inner_sums(alpha, beta, pairs, cap=cap)
        lhs = float(sum(abs(v) for v in inner.values()))
        ma, mb = m_beta(alpha, X1, X2, q_cap), m_beta(beta, X1, X2, q_cap)
        first = theorem3_first_term(ma, mb, X1, X2, H1, H2)
        second = (X1 * X2) ** 1.5 * N * alpha.norm() * beta.norm() * (1 / H1 + 1 / H2)
        extra = {"kind": kind, "Mstar_alpha": ma, "Mstar_beta": mb}
        if (H1, H2) == (X1, X2):
            full = theorem2_denominator(m_beta(alpha, X1, X2), m_beta(beta, X1, X2), X1, X2)
            # (X1 H2 + X2 H1) = 2 X1 X2 at the top of the range
            extra["degenerates_to_theorem2"] = first == 2 * full
        out.append(BoundReport(
            lhs=lhs,
            rhs_components={"first": first, "second": second},
            ratio=_ratio(lhs, first + second),
            grid={"N": N, "X1": X1, "X2": X2, "H1": H1, "H2": H2, "trial": trial},
            extra=extra,
        ))
    return out


def max_ratio(reports: list[BoundReport]) -> float:
    return max((r.ratio for r in reports), default=0.0)


def gcd_stratification(alpha: CoeffSeq, beta: CoeffSeq, gamma: CoeffSeq,
                       signs: tuple[int, int] = (1, 1), cap: int | None = None,
                       tol: float = 1e-8) -> dict:
    """Split the bilinear form by the shape of (D1, D2).

    Strata: ``coprime`` ((D1, D2) = 1), ``equal_prime`` (D1 = D2 = p) and
    ``remainder``.  The coprime stratum is recomputed from the product of
    two classical sums, and the equal-prime stratum from the case table
    ``S(1, m, n, 1, p, p) = S(m, 0; p) S(n, 0; p) + p``.
    """
    N = _support_length(alpha, beta)
    a, b = alpha.as_array(N), beta.as_array(N)
    inner = inner_sums(alpha, beta, sorted(gamma.entries), signs, cap=cap)
    strata = {"coprime": 0j, "equal_prime": 0j, "remainder": 0j}
    coprime_check = 0j
    equal_prime_check = 0j
    heuristic = 0j
    idx = np.arange(1, N + 1)
    for (D1, D2), g in gamma.entries.items():
        term = g * inner[(D1, D2)]
        if math.gcd(D1, D2) == 1:
            strata["coprime"] += term
            K = np.empty((N, N), dtype=complex)
            for i, m in enumerate(signs[0] * idx):
                for j, n in enumerate(signs[1] * idx):
                    f1, f2 = factor_coprime(1, int(m), int(n), 1, D1, D2)
                    K[i, j] = f1.to_complex() * f2.to_complex()
            coprime_check += g * (a @ K @ b)
        elif D1 == D2 and is_prime(D1):
            p = D1
            strata["equal_prime"] += term
            m_unit = (signs[0] * idx) % p != 0
            n_unit = (signs[1] * idx) % p != 0
            table = np.where(
                m_unit[:, None] & n_unit[None, :], p + 1,
                np.where(~m_unit[:, None] & ~n_unit[None, :], p * p - p + 1, 1))
            equal_prime_check += g * (a @ table @ b)
            heuristic += (p + 1) * g * a[m_unit].sum() * b[n_unit].sum()
        else:
            strata["remainder"] += term
    total = bilinear_s(alpha, beta, gamma, signs, cap=cap)
    return {
        "strata": strata,
        "magnitudes": {k: abs(v) for k, v in strata.items()},
        "total": total,
        "additive": abs(sum(strata.values()) - total) <= tol,
        "coprime_product_form_agrees": abs(coprime_check - strata["coprime"]) <= tol,
        "equal_prime_table_agrees": abs(equal_prime_check - strata["equal_prime"]) <= tol,
        "equal_prime_heuristic": heuristic,
    }
