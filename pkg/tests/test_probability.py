from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
import sympy

from cubicpair.core import primes_up_to
from cubicpair.probability import (PROB1_TAIL, PROB2_TAIL, Interval, RatioDistribution,
                                   TailSpec, decimal_str, exact_condition_probability,
                                   exp_neg_enclosure, f_complement, monte_carlo_condition,
                                   prob1_at, prob1_at_gf, prob1_complement_bound, prob2_at,
                                   prob3, prob3_by_sum, prob_mgood_interval, tail_enclosure,
                                   tail_sum_bound, worker_count)


def test_prob3_closed_form():
    assert 1 - prob3() == Fraction(915010783104, 9**16)
    assert prob3_by_sum() == prob3()


def test_prob3_swapped_weights_differ():
    one, two = Fraction(2, 9), Fraction(1, 9)   # roles exchanged on purpose
    total = sum(comb(16, a) * comb(16 - a, b) * two ** (a + b) * one ** (16 - a - b)
                for a in range(1, 17) for b in range(1, 17 - a))
    assert 1 - 6 * total != prob3()


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
def test_ratio_distribution_normalised(p):
    assert RatioDistribution(p).total() == 1


def test_f_complement_small_prime_by_enumeration():
    # p = 2 by direct count over all (F_2^2)^16 column matrices, grouped by class counts.
    p = 2
    weights = [Fraction(1, 4)] * 3     # three projective classes, each (p-1)/p^2 = 1/4
    zero = Fraction(1, 4)
    at_most_two = Fraction(0)
    # multinomial over (zero columns, class0, class1, class2)
    for z in range(17):
        for a in range(17 - z):
            for b in range(17 - z - a):
                c = 16 - z - a - b
                used = sum(1 for k in (a, b, c) if k)
                if used <= 2:
                    mult = comb(16, z) * comb(16 - z, a) * comb(16 - z - a, b)
                    at_most_two += mult * zero**z * weights[0] ** (a + b + c)
    assert f_complement(p) == at_most_two


def test_f_bound_explicit():
    for p in primes_up_to(10_000):
        if p % 3 == 2:
            assert f_complement(p) * p**14 <= 32767


def test_f_bound_polynomial_certificate():
    """32767 p^17 - p^31 f(p) has nonnegative coefficients after p -> x + 10^4."""
    p, x = sympy.symbols("p x")
    poly = 2 * 32767 * p**17 - (2 * (p**16 + p**15 - 1) + (p + 1) * ((2 * p - 1) ** 16 - 2 * p**16 + 1))
    shifted = sympy.Poly(sympy.expand(poly.subs(p, x + 10_000)), x)
    assert all(c >= 0 for c in shifted.all_coeffs())
    # Spot check the identity against f_complement itself.
    for q in (11, 17):
        assert Fraction(int(poly.subs(p, q)), 2) == 32767 * q**17 - q**31 * f_complement(q)


@pytest.mark.parametrize("p", [7, 13, 19, 31])
def test_prob1_routes_agree(p):
    assert prob1_at(p) == prob1_at_gf(p)
    assert 1 - prob1_at(p) <= prob1_complement_bound(p)


def test_prob1_at_7_value():
    assert decimal_str(prob1_at(7), 8) == "0.99990129"


def test_prob1_rejects_wrong_residue():
    with pytest.raises(ValueError):
        prob1_at(5)
    with pytest.raises(ValueError):
        prob2_at(7)


def test_interval_and_enclosure():
    x = Fraction(1, 1000)
    e = exp_neg_enclosure(x)
    assert e.lo < e.hi
    import math
    assert e.contains(Fraction(math.exp(-0.001)))
    with pytest.raises(ValueError):
        Interval(Fraction(1), Fraction(0))
    with pytest.raises(ValueError):
        exp_neg_enclosure(Fraction(2))


def test_tail_zero_gives_unit_interval():
    tiny = TailSpec("empty", 0, 9, 13, 1)
    assert tail_enclosure(tiny) == Interval(Fraction(1), Fraction(1))


def test_tail_sum_dominates_first_term():
    first = Fraction(PROB1_TAIL.c, 13**PROB1_TAIL.exponent)
    total = tail_sum_bound(PROB1_TAIL)
    assert total >= first
    # A bound built from a single term at exponent 14 is far smaller than that term:
    # exp(-9152/(13*13^13)) = 0.9999999999977 cannot bound a product containing 1 - 9152/13^9.
    literal = Fraction(9152, 13 * 13**13)
    assert literal < first
    assert tail_enclosure(PROB1_TAIL).lo <= 1 - first


def test_final_interval():
    rep = prob_mgood_interval()
    assert rep.final_interval.lo >= Fraction(9694, 10000)
    assert rep.final_interval.hi == prob2_at(2)
    assert decimal_str(rep.final_interval.hi, 4) == "0.9700"
    assert rep.prob1_lower >= Fraction(9999, 10000)
    assert rep.prob1_lower <= prob1_at(7)


def test_dropping_prob3_scales_bound():
    rep = prob_mgood_interval()
    assert rep.final_interval.lo / rep.prob3 == rep.prob1_lower * rep.prob2_lower


def test_monte_carlo_basics():
    with pytest.raises(ValueError):
        monte_carlo_condition(7, "I", 0)
    a = monte_carlo_condition(5, "II", 20_000, seed=1, chunk=5000, workers=1)
    b = monte_carlo_condition(5, "II", 20_000, seed=1, chunk=5000, workers=3)
    assert a == b
    assert a.covers(exact_condition_probability(5, "II"))


def test_monte_carlo_condition_three():
    res = monte_carlo_condition(3, "III", 30_000, seed=2)
    assert res.covers(prob3())


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("CUBICPAIR_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("CUBICPAIR_THREADS", "1")
    assert worker_count() == 1
