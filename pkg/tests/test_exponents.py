from __future__ import annotations

import json
from fractions import Fraction

import pytest

from cubicpair.exponents import (ExponentConstraint, ExponentError, build_constraints, certify,
                                 lambda_bound, load_constraints, p0_branch_threshold,
                                 p0_compatibility_exponent, solve_minmax)


def C(label, N, alpha, beta):
    return ExponentConstraint(label, "P_lower", N, alpha, beta)


def test_default_instance():
    res = solve_minmax(build_constraints())
    assert res.delta_star == Fraction(566, 34905)
    assert res.optimal_exponent == 2327
    assert res.active_constraints == ("E3", "E4")
    assert not res.boundary_optimal
    assert res.lambda_exponent == 2328
    assert certify(res)


def test_other_constraints_slack_at_optimum():
    res = solve_minmax(build_constraints())
    values = {c.label: c(res.delta_star) for c in build_constraints()}
    assert values["E1"] == Fraction(160563, 283)
    assert values["E1"] < 2327 and values["E2"] < 2327


def test_permutation_invariance():
    cons = build_constraints()
    ref = solve_minmax(cons)
    for perm in (cons[::-1], cons[1:] + cons[:1], [cons[2], cons[0], cons[3], cons[1]]):
        res = solve_minmax(perm)
        assert (res.delta_star, res.optimal_exponent, res.active_constraints) == \
            (ref.delta_star, ref.optimal_exponent, ref.active_constraints)


def test_two_constraint_crossing():
    res = solve_minmax([C("a", 1, 0, 1), C("b", 1, 1, -1)], (0, 1))
    assert res.delta_star == Fraction(1, 2) and res.optimal_exponent == 2


def test_boundary_optimum():
    res = solve_minmax([C("only", 1, 0, 1)], (0, Fraction(1, 3)))
    assert res.boundary_optimal and res.delta_star == Fraction(1, 3) and res.optimal_exponent == 3
    assert certify(res)


def test_perturbation_moves_optimum():
    cons = build_constraints()
    cons[2] = C("E3", 565, 0, 15)
    res = solve_minmax(cons)
    assert res.delta_star == Fraction(113, 6975)
    assert res.optimal_exponent == 2325
    assert certify(res)


def test_certificate_rejects_wrong_optimum():
    res = solve_minmax(build_constraints())
    from dataclasses import replace
    assert not certify(replace(res, optimal_exponent=Fraction(2326)))
    assert not certify(replace(res, delta_star=Fraction(1, 100)))


def test_errors():
    with pytest.raises(ExponentError):
        solve_minmax([])
    with pytest.raises(ExponentError):
        solve_minmax(build_constraints(), (Fraction(1, 30), 0))
    with pytest.raises(ExponentError):
        solve_minmax([C("x", 1, 0, 1), C("x", 2, 0, 1)], (0, 1))
    with pytest.raises(ExponentError):
        solve_minmax([C("pole", 1, Fraction(-1, 2), 1)], (0, 1))
    with pytest.raises(ExponentError):
        ExponentConstraint("k", "bogus", 1, 0, 1)


def test_lambda_bound_rounding():
    def fake(value):
        return solve_minmax([C("a", value, 1, 0)], (0, 1))
    assert lambda_bound(fake(Fraction(2327))) == 2328
    assert lambda_bound(fake(Fraction(10))) == 11
    assert lambda_bound(fake(Fraction(4655, 2))) == 2329


def test_side_conditions():
    d = Fraction(566, 34905)
    assert p0_branch_threshold(d) < 2327
    assert p0_compatibility_exponent(d) == build_constraints()[3](d) == 2327
    with pytest.raises(ExponentError):
        p0_compatibility_exponent(Fraction(1, 30))


def test_load_constraints_file(tmp_path):
    data = {"interval": ["0", "1/30"], "constraints": [c.to_json() for c in build_constraints()]}
    cons, interval = load_constraints(json.dumps(data))
    assert interval == (0, Fraction(1, 30))
    assert solve_minmax(cons, interval).optimal_exponent == 2327
    cons2, _ = load_constraints(json.dumps([c.to_json() for c in build_constraints()]))
    assert cons2 == cons
    with pytest.raises(ExponentError):
        load_constraints('[{"label": "a"}]')
    with pytest.raises(ExponentError):
        load_constraints('{"constraints": 3}')
