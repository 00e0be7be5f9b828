from __future__ import annotations

from itertools import product

import numpy as np
import pytest

from cubicpair.checks import random_mgood_pairs
from cubicpair.core import FeasibilityError, FormPair, FormPairError
from cubicpair.search import (MITM_CAP, lambda_profile, search_equal_ratio,
                              search_meet_in_middle, verify_solution)


def brute_min_sup(pair, support, B):
    best = None
    for x in product(range(-B, B + 1), repeat=len(support)):
        if not any(x):
            continue
        full = [0] * pair.n
        for i, v in zip(support, x):
            full[i] = v
        if pair.evaluate(full) == (0, 0):
            s = max(map(abs, x))
            best = s if best is None else min(best, s)
    return best


def planted(x0, rng, rows=2):
    y = [v**3 for v in x0]
    out = []
    for _ in range(rows):
        u = [int(v) for v in rng.integers(-4, 5, len(x0))]
        u[-1] = 0
        dot = sum(a * b for a, b in zip(u, y))
        out.append(tuple(y[-1] * a for a in u[:-1]) + (-dot,))
    return FormPair(*out)


def test_verify_examples():
    pair = FormPair((1, 1), (2, 2))
    assert verify_solution(pair, (1, -1))
    assert not verify_solution(pair, (0, 0))
    with pytest.raises(FormPairError):
        verify_solution(FormPair((1,) * 7, (1,) * 7), (1, 12, 9, 10, -1, -12))


def test_taxicab_identity():
    pair = FormPair((1, 1, -1, -1), (2, 2, -2, -2))
    assert verify_solution(pair, (1, 12, 9, 10))
    assert not verify_solution(pair, (1, 12, -9, -10))


def test_equal_ratio_pair_example():
    res = search_equal_ratio(FormPair((1, -8, 3), (2, -16, 1)), 5)
    assert res.solution == (2, 1, 0) and res.sup_norm == 2 and res.strategy == "EqualRatioPair"


def test_equal_ratio_symmetric_block():
    pair = FormPair((1, 1, 1, -1, -1, -1), (1, 1, 1, -1, -1, -1))
    res = search_equal_ratio(pair, 3)
    assert res.sup_norm == 1 and verify_solution(pair, res.solution)
    assert verify_solution(pair, (1,) * 6)


def test_equal_ratio_seven_block():
    # No two multipliers cancel as a pair, but three can: 1 + 2 - 3 = 0 at x = 1.
    pair = FormPair((1, 2, -3, 5), (3, 6, -9, 1))
    res = search_equal_ratio(pair, 4)
    assert res.strategy == "EqualRatioSeven" and res.sup_norm == 1


def test_equal_ratio_errors():
    with pytest.raises(FormPairError):
        search_equal_ratio(FormPair((1, 2), (1, 3)), 5)
    with pytest.raises(ValueError):
        search_equal_ratio(FormPair((1, 1), (1, 1)), 0)


def test_mitm_consistent_with_equal_ratio():
    pair = FormPair((1, -8, 3), (2, -16, 1))
    assert search_meet_in_middle(pair, [0, 1], 5).sup_norm == search_equal_ratio(pair, 5).sup_norm


def test_planted_zero_found():
    rng = np.random.default_rng(8)
    x0 = (1, 2, -1, 3)
    pair = planted(x0, rng)
    assert verify_solution(pair, x0)
    res = search_meet_in_middle(pair, range(4), 5)
    assert res.found and res.sup_norm <= 3 and verify_solution(pair, res.solution)


@pytest.mark.parametrize("seed", range(6))
def test_minimality_against_enumeration(seed):
    rng = np.random.default_rng(seed)
    x0 = tuple(int(v) for v in rng.integers(1, 4, 3))
    pair = planted(x0, rng)
    for support, B in (((0, 1, 2), 6), ((0, 1), 20), ((1, 2), 20)):
        res = search_meet_in_middle(pair, support, B)
        assert res.sup_norm == brute_min_sup(pair, support, B)


def test_single_variable_support():
    res = search_meet_in_middle(FormPair((1, 1), (2, 3)), [0], 3)
    assert not res.found and res.nodes_explored > 0


def test_determinism():
    pair = random_mgood_pairs(1, seed=4)[0]
    a = search_meet_in_middle(pair, [0, 3, 5, 9], 8)
    b = search_meet_in_middle(pair, [9, 5, 3, 0], 8)
    assert a == b


def test_fuzz_reported_solutions_verify():
    for pair in random_mgood_pairs(4, bound=5, seed=12):
        res = search_meet_in_middle(pair, [0, 1, 2, 3], 30)
        if res.found:
            assert verify_solution(pair, res.solution)


def test_caps():
    pair = FormPair((1,) * 8, (2,) * 8)
    with pytest.raises(FeasibilityError):
        search_meet_in_middle(pair, range(7), 2)
    with pytest.raises(FeasibilityError):
        search_meet_in_middle(pair, range(6), int(MITM_CAP ** (1 / 3)) + 2)
    with pytest.raises(FormPairError):
        search_meet_in_middle(pair, [0, 9], 2)


def test_profile_rich_pair():
    prof = lambda_profile(FormPair((1, -1, 2, 5), (1, -1, 1, 1)), 8)
    assert prof.best == 1 and prof.within_theorem_bound
    assert prof.rows[0].strategy == "EqualRatioPair"


def test_profile_exhaustion():
    prof = lambda_profile(FormPair((1, 2), (1, 3)), 16, max_support=2)
    assert prof.best is None and prof.within_theorem_bound is None
    assert prof.rows[0].nodes_explored > 0 and prof.rows[0].bound == 16


def test_profile_fuzz_small_pairs():
    rng = np.random.default_rng(21)
    found = 0
    for _ in range(100):
        c = tuple(int(v) for v in rng.choice([-3, -2, -1, 1, 2, 3], 4))
        d = tuple(int(v) for v in rng.choice([-3, -2, -1, 1, 2, 3], 4))
        prof = lambda_profile(FormPair(c, d), 4, max_support=3)
        for row in prof.rows:
            if row.solution is not None:
                found += 1
                assert verify_solution(FormPair(c, d), row.solution)
    assert found > 0
