from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cubicpair.core import FormPair, primes_up_to
from cubicpair.mgood import (check_condition_i, check_condition_ii, check_condition_iii,
                             check_mgood, condition_holds_batch)


def parallel(a, b, p):
    return (a[0] * b[1] - a[1] * b[0]) % p == 0


def oracle_condition(pair, p):
    """Definitional checks from pairwise cross products only."""
    cols = pair.columns()
    if p % 3 == 1:
        # The largest set of pairwise parallel columns: every column's closed
        # neighbourhood is such a set because parallelism plus 0/0 is transitive
        # within a class.
        best = max(sum(1 for b in cols if parallel(a, b, p)) for a in cols)
        return best <= 9
    reps = []
    for a in cols:
        if a[0] % p == 0 and a[1] % p == 0:
            continue
        if not any(parallel(a, r, p) for r in reps):
            reps.append(a)
    if p == 3:
        return max(len(reps), 1) != 2
    return len(reps) >= 3


def oracle_mgood(pair):
    ok = all(oracle_condition(pair, p) for p in primes_up_to(pair.M**2) if p != 3)
    return ok and oracle_condition(pair, 3)


def pair_16(columns):
    return FormPair.from_columns(columns)


def test_condition_i_all_parallel():
    v = check_condition_i(pair_16([(1, 1)] * 16), 7)
    assert not v.satisfied and v.witness["parallel_count"] == 16


def test_condition_i_spread_classes():
    cols = [(r, 1) for r in range(7) for _ in range(2)] + [(1, 0), (1, 0)]
    assert check_condition_i(pair_16(cols), 7).satisfied


def test_condition_i_both_zero_joins_class():
    cols = [(1, 1)] * 9 + [(13, 26)] + [(r, 1) for r in range(2, 8)]
    v = check_condition_i(pair_16(cols), 13)
    assert not v.satisfied and v.witness["parallel_count"] == 10 and v.witness["both_zero"] == 1
    # The witness really is pairwise parallel.
    idx = v.witness["indices"]
    pair = pair_16(cols)
    assert all(parallel(pair.columns()[i], pair.columns()[j], 13) for i in idx for j in idx)


def test_condition_i_wrong_residue():
    with pytest.raises(ValueError):
        check_condition_i(pair_16([(1, 1)] * 16), 5)


def test_condition_ii_examples():
    cols = [(3, 1)] * 15 + [(1, 0)]
    v = check_condition_ii(pair_16(cols), 5)
    assert not v.satisfied and v.witness["distinct_classes"] == 2
    assert check_condition_ii(FormPair((0, 1, 1), (1, 1, 0)), 2).satisfied
    assert not check_condition_ii(FormPair((5, 10), (5, 5)), 5).satisfied
    with pytest.raises(ValueError):
        check_condition_ii(FormPair((1,), (1,)), 7)


def test_condition_iii_examples():
    assert check_condition_iii(FormPair((1, 4), (1, 1))).satisfied
    assert not check_condition_iii(FormPair((1, 2), (1, 1))).satisfied
    assert check_condition_iii(FormPair((0, 1, 1), (1, 1, 0))).satisfied


def test_condition_iii_all_both_zero_is_one_ratio():
    v = check_condition_iii(FormPair((3, 6), (9, 3)))
    assert v.satisfied and "policy" in v.witness
    assert check_mgood(FormPair((3, 6), (9, 3))).notes


def test_mgood_m_equals_one():
    rep = check_mgood(FormPair((1,) * 16, (1,) * 16))
    assert rep.is_mgood and rep.prime_bound == 1 and not rep.failures


def test_mgood_fails_at_two():
    rep = check_mgood(FormPair((1,) * 16, (1,) * 15 + (2,)))
    assert not rep.is_mgood
    # Mod 3 the ratios are 1 and 2, so condition III fails as well.
    assert [(v.p, v.condition) for v in rep.failures] == [(2, "II"), (3, "III")]


def test_random_wide_matrix_is_usually_mgood():
    rng = np.random.default_rng(5)
    found = 0
    for _ in range(20):
        pair = FormPair(tuple(int(v) for v in rng.integers(-100, 101, 16)),
                        tuple(int(v) for v in rng.integers(1, 101, 16)))
        rep = check_mgood(pair)
        if rep.is_mgood:
            found += 1
            assert rep.failures == [] and rep.to_json()["failures"] == []
    assert found >= 10


def test_verbose_lists_every_prime_sorted():
    pair = FormPair(tuple(range(1, 17)), tuple(range(2, 18)))
    rep = check_mgood(pair, verbose=True)
    ps = [v.p for v in rep.verdicts]
    assert ps == sorted(ps) and 3 in ps and len(ps) == len(primes_up_to(pair.M**2))


cols16 = st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)).filter(lambda t: t != (0, 0)),
                  min_size=16, max_size=16)


@given(cols16)
def test_agrees_with_pairwise_oracle(cols):
    pair = FormPair.from_columns(cols)
    assert check_mgood(pair).is_mgood == oracle_mgood(pair)


@given(cols16, st.randoms(use_true_random=False))
def test_permutation_and_sign_invariance(cols, rnd):
    pair = FormPair.from_columns(cols)
    shuffled = list(cols)
    rnd.shuffle(shuffled)
    shuffled = [(-a, -b) if rnd.random() < 0.5 else (a, b) for a, b in shuffled]
    assert check_mgood(FormPair.from_columns(shuffled)).is_mgood == check_mgood(pair).is_mgood


@pytest.mark.parametrize("p,cond", [(7, "I"), (13, "I"), (2, "II"), (5, "II"), (3, "III")])
def test_batch_matches_scalar(p, cond):
    rng = np.random.default_rng(p)
    c = rng.integers(0, p, size=(300, 16))
    d = rng.integers(0, p, size=(300, 16))
    # Skew some rows so failures actually occur.
    c[:100] = c[:100, :1]
    d[:100] = d[:100, :1]
    batch = condition_holds_batch(c, d, p, cond)
    check = {"I": check_condition_i, "II": check_condition_ii}
    for row in range(300):
        cols = [(int(a), int(b)) for a, b in zip(c[row], d[row])]
        # Scalar checkers need nonzero integer columns; shift zero columns by p.
        cols = [(a + p, b) if (a, b) == (0, 0) else (a, b) for a, b in cols]
        pair = FormPair.from_columns(cols)
        scalar = check_condition_iii(pair) if cond == "III" else check[cond](pair, p)
        assert bool(batch[row]) == scalar.satisfied
