"""Cubic exponential sums, the local factors A(q) and the truncated singular series.

Exact values come from local counts: for a prime power,
    sum_{i<=k} A(p^i) = p^(-(n-2)k) rho(p^k),
so A(p^k) is a difference of two normalized counts.  The complex-exponential
definition of A(q) is kept only as a floating-point cross-check for small q.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .core import FormPair, factorize, primes_up_to
from .local import ALL, rho_dp

EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class GaussSumValue:
    a: int
    q: int
    value: complex
    error: float


def gauss_sum(a: int, q: int) -> GaussSumValue:
    """S(a, q) = sum_{m=1}^{q} e(a m^3 / q) by direct summation."""
    if q < 1:
        raise ValueError("q must be positive")
    a %= q
    if a == 0:
        return GaussSumValue(0, q, complex(q, 0), 0.0)
    # Reduce a m^3 mod q in integers so the angle is exact up to one rounding.
    m = np.arange(1, q + 1, dtype=object)
    residues = np.array([int(v) for v in (a * m**3) % q], dtype=np.float64)
    angles = 2.0 * math.pi * residues / q
    value = complex(np.cos(angles).sum(), np.sin(angles).sum())
    # Each term carries a few ulps of angle and trig error; summation adds q ulps.
    error = 8.0 * q * EPS * (1 + math.log2(q + 1))
    return GaussSumValue(a, q, value, error)


@dataclass(frozen=True)
class ArcDecomposition:
    gamma: int
    q: int
    q_i: int
    b_i: int


def arc_decompose(pair: FormPair, a1: int, a2: int, q: int, i: int) -> ArcDecomposition:
    """q_i = q / (q, c_i a1 + d_i a2) and b_i = (c_i a1 + d_i a2) / (q, c_i a1 + d_i a2)."""
    gamma = pair.c[i] * a1 + pair.d[i] * a2
    return decompose(gamma, q)


def decompose(gamma: int, q: int) -> ArcDecomposition:
    g = gcd(q, gamma)
    return ArcDecomposition(gamma, q, q // g, gamma // g)


def a_of_prime_power(pair: FormPair, p: int, k: int) -> Fraction:
    if k == 0:
        return Fraction(1)
    e = pair.n - 2
    this = Fraction(rho_dp(pair, p**k, ALL).value, p ** (e * k))
    prev = Fraction(1) if k == 1 else Fraction(rho_dp(pair, p ** (k - 1), ALL).value, p ** (e * (k - 1)))
    return this - prev


def a_of_q(pair: FormPair, q: int) -> Fraction:
    """A(q) as the product of its prime-power factors."""
    if q < 1:
        raise ValueError("q must be positive")
    out = Fraction(1)
    for p, k in factorize(q).items():
        out *= a_of_prime_power(pair, p, k)
    return out


def a_of_q_direct(pair: FormPair, q: int) -> complex:
    """A(q) from its definition: sum over (a1, a2) mod q, gcd(a1, a2, q) = 1, of prod S(b_i, q_i)/q_i."""
    table = {}
    for r in range(q):
        table[r] = gauss_sum(r, q).value / q
    total = 0j
    for a1 in range(1, q + 1):
        for a2 in range(1, q + 1):
            if gcd(gcd(a1, a2), q) != 1:
                continue
            term = 1 + 0j
            for c, d in zip(pair.c, pair.d):
                # S(gamma, q)/q equals S(b_i, q_i)/q_i.
                term *= table[(c * a1 + d * a2) % q]
            total += term
    return total


def _mobius(m: int) -> int:
    f = factorize(m)
    return 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)


def value_histogram(pair: FormPair, q: int) -> np.ndarray:
    """hist[u, v] = #{x mod q : F(x) = u, G(x) = v mod q}, by direct enumeration."""
    if q**pair.n > 10**7:
        raise ValueError(f"{q}^{pair.n} points is too many for direct enumeration")
    pts = np.indices((q,) * pair.n).reshape(pair.n, -1).T.astype(np.int64)
    cubes = (pts**3) % q
    f = (cubes @ np.array([a % q for a in pair.c], dtype=np.int64)) % q
    g = (cubes @ np.array([b % q for b in pair.d], dtype=np.int64)) % q
    return np.bincount(f * q + g, minlength=q * q).reshape(q, q)


def a_of_q_character(pair: FormPair, q: int) -> Fraction:
    """A(q) exactly from its definition as a character sum, without using rho differences.

    Expanding the Gauss sums, q^n A(q) = sum over x mod q and primitive (a1, a2) of
    e((a1 F(x) + a2 G(x))/q) = sum_r h[r] e(r/q), where h[r] counts pairs with
    a1 F + a2 G = r.  The set of primitive (a1, a2) is stable under units, so h[r]
    only depends on g = gcd(r, q) and sum_{gcd(r,q)=g} e(r/q) is the Ramanujan sum
    mu(q/g).  This gives an exact integer.
    """
    if q < 1:
        raise ValueError("q must be positive")
    hist = value_histogram(pair, q)
    u, v = np.indices((q, q))
    h = np.zeros(q, dtype=np.int64)
    for a1 in range(q):
        for a2 in range(q):
            if gcd(gcd(a1, a2), q) != 1:
                continue
            h += np.bincount(((a1 * u + a2 * v) % q).ravel(), weights=hist.ravel(),
                             minlength=q).astype(np.int64)
    total = 0
    for g in (d for d in range(1, q + 1) if q % d == 0):
        orbit = [r for r in range(q) if gcd(r, q) == g]
        if len({int(h[r]) for r in orbit}) != 1:
            raise AssertionError("histogram is not constant on a unit orbit")
        total += int(h[orbit[0]]) * _mobius(q // g)
    return Fraction(total, q**pair.n)


def k_of(p: int, P0: int) -> int:
    """Largest t with p^t <= P0, by repeated multiplication."""
    t, v = 0, 1
    while v * p <= P0:
        v *= p
        t += 1
    return t


@dataclass(frozen=True)
class SeriesTruncation:
    P0: int
    A_values: dict[int, Fraction]
    truncated_series: Fraction
    euler_product: Fraction
    remainder: Fraction
    k_map: dict[int, int]

    @property
    def positive(self) -> bool:
        return self.truncated_series > 0

    def to_json(self, precision: int = 12) -> dict:
        def fmt(x: Fraction) -> dict:
            return {"exact": f"{x.numerator}/{x.denominator}", "decimal": f"{float(x):.{precision}g}"}
        return {"P0": self.P0,
                "truncated_series": fmt(self.truncated_series),
                "euler_product": fmt(self.euler_product),
                "remainder": fmt(self.remainder),
                "positive": self.positive,
                "k_map": {str(p): k for p, k in self.k_map.items()},
                "A": {str(q): f"{v.numerator}/{v.denominator}" for q, v in self.A_values.items()}}


def truncated_series(pair: FormPair, P0: int) -> SeriesTruncation:
    if P0 < 1:
        raise ValueError("P0 must be positive")
    e = pair.n - 2
    primes = list(primes_up_to(P0))
    k_map = {p: k_of(p, P0) for p in primes}
    # Normalized counts rho(p^i)/p^(e i) for every prime power <= P0.
    normalized: dict[tuple[int, int], Fraction] = {}
    for p in primes:
        for i in range(1, k_map[p] + 1):
            normalized[p, i] = Fraction(rho_dp(pair, p**i, ALL).value, p ** (e * i))
    local_a: dict[tuple[int, int], Fraction] = {}
    for (p, i), v in normalized.items():
        local_a[p, i] = v - (normalized[p, i - 1] if i > 1 else 1)
    A_values = {}
    for q in range(1, P0 + 1):
        val = Fraction(1)
        for p, i in factorize(q).items():
            val *= local_a[p, i]
        A_values[q] = val
    series = sum(A_values.values(), Fraction(0))
    euler = Fraction(1)
    for p in primes:
        euler *= normalized[p, k_map[p]]
    return SeriesTruncation(P0, A_values, series, euler, abs(series - euler), k_map)
