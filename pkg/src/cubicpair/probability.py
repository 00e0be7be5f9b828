"""Probability that a random 2 x 16 coefficient matrix is M-good.

Random model: for each prime p, the 16 columns are independent and uniform in
(Z/p)^2, so each of the p + 1 projective classes has probability (p-1)/p^2 and
the 0/0 class has probability 1/p^2.  Conditions at different primes are
multiplied as independent events.

Everything on the certified path is an exact ``Fraction``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .core import primes_up_to, require_prime
from .mgood import PARALLEL_CAP, condition_holds_batch

N_COLUMNS = 16
PROB1_CUTOFF = 1000

# Tail constants: f(p) <= 32767 / p^14 for p = 2 mod 3, and the complement of
# condition I is at most C(16,10)(p+1)/p^10 <= 9152 / p^9 for p >= 7.
PROB2_TAIL_C, PROB2_TAIL_EXP, PROB2_CUT = 32767, 14, 541
PROB1_TAIL_C, PROB1_TAIL_EXP, PROB1_CUT = 9152, 9, 13


@dataclass(frozen=True)
class RatioDistribution:
    p: int

    @property
    def per_class(self) -> Fraction:
        return Fraction(self.p - 1, self.p**2)

    @property
    def both_zero(self) -> Fraction:
        return Fraction(1, self.p**2)

    @property
    def classes(self) -> int:
        return self.p + 1

    def total(self) -> Fraction:
        return self.classes * self.per_class + self.both_zero


def prob3() -> Fraction:
    """Probability of 1 or >= 3 distinct ratios mod 3 among 16 columns."""
    return 1 - Fraction(6 * 5**16 - 12 * 3**16 + 6, 9**16)


def prob3_by_sum() -> Fraction:
    """Same quantity, summing the two-ratio event over its counts (k1, k2)."""
    two, one = Fraction(2, 9), Fraction(1, 9)
    total = Fraction(0)
    for k1 in range(1, N_COLUMNS + 1):
        for k2 in range(1, N_COLUMNS - k1 + 1):
            total += (comb(N_COLUMNS, k1) * comb(N_COLUMNS - k1, k2)
                      * two ** (k1 + k2) * one ** (N_COLUMNS - k1 - k2))
    return 1 - comb(4, 2) * total


def f_complement(p: int) -> Fraction:
    """Probability of at most 2 distinct classes mod p (including the zero matrix)."""
    one = Fraction(p**16 + p**15 - 1, p**31)
    two = Fraction((p + 1) * ((2 * p - 1) ** 16 - 2 * p**16 + 1), 2 * p**31)
    return one + two


def prob2_at(p: int) -> Fraction:
    require_prime(p)
    if p % 3 != 2:
        raise ValueError(f"Prob2 is defined for p = 2 mod 3, got {p}")
    return 1 - f_complement(p)


def _check_prob1_prime(p: int) -> None:
    require_prime(p)
    if p % 3 != 1:
        raise ValueError(f"Prob1 is defined for p = 1 mod 3, got {p}")
    if p > PROB1_CUTOFF:
        raise ValueError(f"p = {p} exceeds the cost cap {PROB1_CUTOFF}")


def _overfull_placements(j: int, total: int, cap: int, memo: dict) -> int:
    """Ways to split `total` labelled items into j labelled boxes, each holding > cap."""
    if j == 0:
        return 1 if total == 0 else 0
    key = (j, total)
    if key not in memo:
        memo[key] = sum(comb(total, s) * _overfull_placements(j - 1, total - s, cap, memo)
                        for s in range(cap + 1, total - (j - 1) * (cap + 1) + 1))
    return memo[key]


def _capped_assignments(m: int, classes: int, cap: int) -> int:
    """Labelled assignments of m items to `classes` boxes with every box <= cap.

    Inclusion-exclusion over the set of boxes forced to overflow.  For t < 4 0/0
    columns only one box can overflow (2(10 - t) > 16 - t), but for t >= 4 several
    can, so all orders are kept.
    """
    memo: dict = {}
    count = 0
    for j in range(0, min(classes, m // (cap + 1)) + 1):
        inner = sum(comb(m, S) * _overfull_placements(j, S, cap, memo) * (classes - j) ** (m - S)
                    for S in range(j * (cap + 1), m + 1))
        count += (-1) ** j * comb(classes, j) * inner
    return count


def prob1_at(p: int) -> Fraction:
    """Probability that no class plus the 0/0 columns exceeds 9 columns mod p."""
    _check_prob1_prime(p)
    total = 0
    for t in range(PARALLEL_CAP):  # t = number of 0/0 columns, at most 8
        m = N_COLUMNS - t
        count = _capped_assignments(m, p + 1, PARALLEL_CAP - t)
        total += comb(N_COLUMNS, t) * (p - 1) ** m * count
    return Fraction(total, p ** (2 * N_COLUMNS))


def _truncated_exp_power(cap: int, power: int, degree: int) -> list[Fraction]:
    """Coefficients of (sum_{j<=cap} x^j/j!)^power, truncated at `degree`."""
    base = [Fraction(1, math.factorial(j)) if j <= cap else Fraction(0) for j in range(degree + 1)]
    result = [Fraction(1)] + [Fraction(0)] * degree
    while power:
        if power & 1:
            result = _poly_mul(result, base, degree)
        base = _poly_mul(base, base, degree)
        power >>= 1
    return result


def _poly_mul(a, b, degree):
    out = [Fraction(0)] * (degree + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(degree + 1 - i):
                out[i + j] += x * b[j]
    return out


def prob1_at_gf(p: int) -> Fraction:
    """Prob1(p) via exponential generating functions (independent of prob1_at)."""
    _check_prob1_prime(p)
    total = Fraction(0)
    for t in range(PARALLEL_CAP):
        m = N_COLUMNS - t
        coeffs = _truncated_exp_power(PARALLEL_CAP - t, p + 1, m)
        count = coeffs[m] * math.factorial(m)
        total += comb(N_COLUMNS, t) * Fraction(p - 1) ** m * count
    return total / p ** (2 * N_COLUMNS)


def prob1_complement_bound(p: int) -> Fraction:
    return Fraction(comb(N_COLUMNS, 10) * (p + 1), p**10)


# ---------------------------------------------------------------------------
# tails and the final interval

@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    def __mul__(self, other: "Interval") -> "Interval":
        # Only used for non-negative intervals.
        return Interval(self.lo * other.lo, self.hi * other.hi)

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self, precision: int = 15) -> dict:
        return {"lo": frac_str(self.lo), "hi": frac_str(self.hi),
                "lo_decimal": decimal_str(self.lo, precision),
                "hi_decimal": decimal_str(self.hi, precision)}


EXACT_STR_DIGITS = 1000


def frac_str(x: Fraction) -> str:
    """numerator/denominator, or a digit count when the fraction is too long to print."""
    digits = int(x.denominator.bit_length() * math.log10(2)) + 1
    if digits > EXACT_STR_DIGITS:
        return f"<exact fraction, denominator ~10^{digits}>"
    return f"{x.numerator}/{x.denominator}"


def round_fraction(x: Fraction, digits: int) -> Fraction:
    """Round half up to `digits` decimals, exactly."""
    scale = 10**digits
    return Fraction(math.floor(x * scale + Fraction(1, 2)), scale)


def decimal_str(x: Fraction, digits: int) -> str:
    r = round_fraction(x, digits)
    sign = "-" if r < 0 else ""
    r = abs(r)
    whole = r.numerator * 10**digits // r.denominator
    s = str(whole).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}" if digits else f"{sign}{s}"


def exp_neg_enclosure(x: Fraction) -> Interval:
    """exp(-x) lies in [1 - x, 1 - x + x^2/2] for 0 <= x < 1."""
    if not 0 <= x < 1:
        raise ValueError("enclosure needs 0 <= x < 1")
    return Interval(1 - x, 1 - x + x * x / 2)


@dataclass(frozen=True)
class TailSpec:
    name: str
    c: int
    exponent: int
    p_cut: int
    residue: int  # primes p = residue mod 3 enter the product
    explicit_to: int = 10_000


TAIL_GRID = 10**60

PROB2_TAIL = TailSpec("prob2_tail", PROB2_TAIL_C, PROB2_TAIL_EXP, PROB2_CUT, 2)
PROB1_TAIL = TailSpec("prob1_tail", PROB1_TAIL_C, PROB1_TAIL_EXP, PROB1_CUT, 1)


def tail_sum_bound(spec: TailSpec) -> Fraction:
    """Upper bound on sum over primes p >= p_cut (p = residue mod 3) of c / p^s.

    Primes up to `explicit_to` are summed exactly; beyond that every integer
    n > L is included and bounded by the integral L^(1-s)/(s-1).
    """
    s, L = spec.exponent, max(spec.explicit_to, spec.p_cut)
    total = Fraction(0)
    for p in primes_up_to(L):
        if p >= spec.p_cut and p % 3 == spec.residue:
            total += Fraction(spec.c, p**s)
    total += Fraction(spec.c, (s - 1) * L ** (s - 1))
    # Round up onto a fixed grid so later products stay small; still an upper bound.
    return Fraction(-((-total.numerator * TAIL_GRID) // total.denominator), TAIL_GRID)


def tail_enclosure(spec: TailSpec) -> Interval:
    """Enclosure [lo, 1] of prod_{p >= p_cut} (1 - c/p^s).

    With every factor in [0, 1], prod (1 - a_i) >= 1 - sum a_i; this also lower
    bounds exp(-sum a_i) from below, so no transcendental evaluation is needed.
    """
    if Fraction(spec.c, spec.p_cut**spec.exponent) >= 1:
        raise ValueError("tail factors must lie in [0, 1)")
    x = tail_sum_bound(spec)
    if x == 0:
        return Interval(Fraction(1), Fraction(1))
    return Interval(exp_neg_enclosure(x).lo, Fraction(1))


def prob2_finite_product(p_cut: int = PROB2_CUT) -> Fraction:
    out = Fraction(1)
    for p in primes_up_to(p_cut - 1):
        if p % 3 == 2:
            out *= prob2_at(p)
    return out


@dataclass(frozen=True)
class ProbabilityReport:
    prob3: Fraction
    prob2_per_prime: dict[int, Fraction]
    prob1_at_7: Fraction
    tail_enclosures: dict[str, Interval]
    prob1_lower: Fraction
    prob2_lower: Fraction
    final_interval: Interval

    def to_json(self, precision: int = 15) -> dict:
        return {
            "prob3": {"exact": frac_str(self.prob3), "decimal": decimal_str(self.prob3, precision)},
            "prob1_at_7": {"exact": frac_str(self.prob1_at_7),
                           "decimal": decimal_str(self.prob1_at_7, precision)},
            "prob2_at_2": decimal_str(self.prob2_per_prime[2], precision),
            "prob1_lower": decimal_str(self.prob1_lower, precision),
            "prob2_lower": decimal_str(self.prob2_lower, precision),
            "tails": {k: v.to_json(precision) for k, v in self.tail_enclosures.items()},
            "interval": self.final_interval.to_json(precision),
            "interval_rounded": [decimal_str(self.final_interval.lo, 4),
                                 decimal_str(self.final_interval.hi, 4)],
        }


def prob_mgood_interval(prob2_tail: TailSpec = PROB2_TAIL,
                        prob1_tail: TailSpec = PROB1_TAIL) -> ProbabilityReport:
    p3 = prob3()
    per_prime = {p: prob2_at(p) for p in primes_up_to(prob2_tail.p_cut - 1) if p % 3 == 2}
    finite2 = Fraction(1)
    for v in per_prime.values():
        finite2 *= v
    t2 = tail_enclosure(prob2_tail)
    t1 = tail_enclosure(prob1_tail)
    p1_7 = prob1_at(7)
    prob1_lower = p1_7 * t1.lo
    prob2_lower = finite2 * t2.lo
    lower = prob1_lower * prob2_lower * p3
    upper = per_prime[2]
    return ProbabilityReport(p3, per_prime, p1_7, {prob2_tail.name: t2, prob1_tail.name: t1},
                             prob1_lower, prob2_lower, Interval(lower, upper))


# ---------------------------------------------------------------------------
# Monte Carlo

@dataclass(frozen=True)
class MonteCarloResult:
    p: int
    condition: str
    trials: int
    successes: int
    seed: int

    @property
    def frequency(self) -> float:
        return self.successes / self.trials

    def sigma(self, prob: float | None = None) -> float:
        pi = self.frequency if prob is None else prob
        return math.sqrt(max(pi * (1 - pi), 0.0) / self.trials)

    def interval(self, k: float = 3.0) -> tuple[float, float]:
        s = self.sigma()
        return self.frequency - k * s, self.frequency + k * s

    def covers(self, exact, k: float = 3.0) -> bool:
        pi = float(exact)
        return abs(self.frequency - pi) <= k * self.sigma(pi) + 1e-15

    def to_json(self) -> dict:
        lo, hi = self.interval()
        return {"p": self.p, "condition": self.condition, "trials": self.trials,
                "successes": self.successes, "frequency": self.frequency,
                "interval_3sigma": [lo, hi], "seed": self.seed}


def exact_condition_probability(p: int, condition: str) -> Fraction:
    if condition == "I":
        return prob1_at(p)
    if condition == "II":
        return prob2_at(p)
    if condition == "III":
        if p != 3:
            raise ValueError("condition III lives at p = 3")
        return prob3()
    raise ValueError(f"unknown condition {condition!r}")


def worker_count() -> int:
    raw = os.environ.get("CUBICPAIR_THREADS", "1")
    n = int(raw)
    if n == 0:
        return os.cpu_count() or 1
    return max(n, 1)


def monte_carlo_condition(p: int, condition: str, trials: int, seed: int = 0,
                          chunk: int = 100_000, workers: int | None = None) -> MonteCarloResult:
    """Sample 16 uniform columns mod p per trial and count how often the condition holds."""
    if trials < 1:
        raise ValueError("trials must be positive")
    require_prime(p)
    sizes = [chunk] * (trials // chunk) + ([trials % chunk] if trials % chunk else [])
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(args):
        size, ss = args
        rng = np.random.default_rng(ss)
        c = rng.integers(0, p, size=(size, N_COLUMNS))
        d = rng.integers(0, p, size=(size, N_COLUMNS))
        return int(condition_holds_batch(c, d, p, condition).sum())

    workers = workers or worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            hits = sum(pool.map(run, zip(sizes, seeds)))
    else:
        hits = sum(map(run, zip(sizes, seeds)))
    return MonteCarloResult(p, condition, trials, hits, seed)
