"""Min-max optimization of the competing lower bounds on the exponent of M in P.

Each constraint says P >> M^E(delta) with E(delta) = N / (alpha + beta*delta).
The smallest admissible exponent is min over delta of max_i E_i(delta).  Every
E_i is monotone on the interval, so the optimum sits where a decreasing and an
increasing constraint cross (or at an endpoint).  All arithmetic is exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

KINDS = ("P_lower", "P0_upper", "P0_lower")


class ExponentError(ValueError):
    pass


def _frac(x) -> Fraction:
    """Accept ints, Fractions and strings such as "566/34905"."""
    return Fraction(x)


@dataclass(frozen=True)
class ExponentConstraint:
    """E(delta) = N / (alpha + beta * delta)."""

    label: str
    kind: str
    N: Fraction
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ExponentError(f"unknown constraint kind {self.kind!r}")
        for name in ("N", "alpha", "beta"):
            object.__setattr__(self, name, _frac(getattr(self, name)))

    def denominator(self, delta: Fraction) -> Fraction:
        return self.alpha + self.beta * delta

    def __call__(self, delta) -> Fraction:
        den = self.denominator(_frac(delta))
        if den == 0:
            raise ZeroDivisionError(f"{self.label} has a pole at delta = {delta}")
        return self.N / den

    def trend(self) -> int:
        """-1 decreasing, +1 increasing, 0 constant (where the denominator keeps its sign)."""
        s = -self.N * self.beta
        return (s > 0) - (s < 0)

    def limit_at(self, delta: Fraction) -> Fraction | None:
        """Value at an endpoint; None when the denominator vanishes there (infinite)."""
        den = self.denominator(delta)
        return None if den == 0 else self.N / den

    def to_json(self) -> dict:
        return {"label": self.label, "kind": self.kind, "N": str(self.N),
                "alpha": str(self.alpha), "beta": str(self.beta)}

    @classmethod
    def from_json(cls, obj: dict) -> "ExponentConstraint":
        return cls(obj["label"], obj.get("kind", "P_lower"),
                   _frac(obj["N"]), _frac(obj["alpha"]), _frac(obj["beta"]))


DEFAULT_INTERVAL = (Fraction(0), Fraction(1, 30))


def build_constraints() -> list[ExponentConstraint]:
    """The four lower bounds on log_M P, epsilons dropped."""
    return [
        ExponentConstraint("E1", "P_lower", Fraction(46), Fraction(0), Fraction(5)),
        ExponentConstraint("E2", "P_lower", Fraction(310), Fraction(3), Fraction(-60)),
        ExponentConstraint("E3", "P_lower", Fraction(566), Fraction(0), Fraction(15)),
        ExponentConstraint("E4", "P_lower", Fraction(1195), Fraction(1), Fraction(-30)),
    ]


def p0_branch_threshold(delta: Fraction) -> Fraction:
    """Exponent of M beyond which P^(1/5-delta)/M^3 <= P^(3/11)/M^(54/11).

    The gap 3/11 - (1/5 - delta) = 4/55 + delta must absorb M^(54/11 - 3) = M^(21/11),
    which gives P >= M^(105/(4 + 55 delta)).
    """
    return Fraction(105) / (4 + 55 * delta)


def p0_compatibility_exponent(delta: Fraction) -> Fraction:
    """P0 = P^(1/5-delta)/M^3 >= P^(5 delta) M^236 iff P >= M^(239/(1/5 - 6 delta))."""
    gap = Fraction(1, 5) - 6 * delta
    if gap <= 0:
        raise ExponentError("needs delta < 1/30")
    return Fraction(239) / gap


@dataclass(frozen=True)
class OptimizationResult:
    delta_star: Fraction
    optimal_exponent: Fraction
    active_constraints: tuple[str, ...]
    boundary_optimal: bool
    constraints: tuple[ExponentConstraint, ...]
    interval: tuple[Fraction, Fraction]

    @property
    def lambda_exponent(self) -> int:
        return lambda_bound(self)

    def to_json(self, precision: int = 6) -> dict:
        return {"delta_star": str(self.delta_star),
                "delta_decimal": f"{float(self.delta_star):.{precision}f}",
                "optimal_exponent": str(self.optimal_exponent),
                "active_constraints": list(self.active_constraints),
                "boundary_optimal": self.boundary_optimal,
                "lambda_exponent": self.lambda_exponent,
                "interval": [str(self.interval[0]), str(self.interval[1])],
                "values_at_delta_star": {c.label: str(c(self.delta_star)) for c in self.constraints}}


def _validate(constraints, interval) -> tuple[Fraction, Fraction]:
    if not constraints:
        raise ExponentError("empty constraint set")
    lo, hi = map(_frac, interval)
    if not lo < hi:
        raise ExponentError(f"empty interval ({lo}, {hi})")
    labels = [c.label for c in constraints]
    if len(set(labels)) != len(labels):
        raise ExponentError("constraint labels must be unique")
    for c in constraints:
        # A linear denominator keeps its sign on the open interval iff it does not
        # change sign between the endpoints; a sign change means a pole inside.
        a, b = c.denominator(lo), c.denominator(hi)
        if a < 0 or b < 0 or (a == 0 and b == 0):
            raise ExponentError(f"{c.label} is not monotone and positive on ({lo}, {hi})")
        if c.N <= 0:
            raise ExponentError(f"{c.label} must have a positive numerator")
    return lo, hi


def _max_at(constraints, delta: Fraction) -> Fraction | None:
    vals = []
    for c in constraints:
        v = c.limit_at(delta)
        if v is None:
            return None
        vals.append(v)
    return max(vals)


def solve_minmax(constraints, interval=DEFAULT_INTERVAL) -> OptimizationResult:
    constraints = tuple(constraints)
    lo, hi = _validate(constraints, interval)
    candidates: set[Fraction] = set()
    for c1, c2 in combinations(constraints, 2):
        denom = c1.N * c2.beta - c2.N * c1.beta
        if denom == 0:
            continue
        delta = (c2.N * c1.alpha - c1.N * c2.alpha) / denom
        if lo < delta < hi:
            candidates.add(delta)
    # Endpoints stand for infima approached from inside the open interval.
    endpoints = {lo, hi}
    best = None
    for delta in sorted(candidates | endpoints):
        value = _max_at(constraints, delta)
        if value is None:
            continue
        if best is None or value < best[1]:
            best = (delta, value)
    if best is None:
        raise ExponentError("the maximum is unbounded on the whole interval")
    delta, value = best
    boundary = delta in endpoints and delta not in candidates
    active = tuple(sorted(c.label for c in constraints if c.limit_at(delta) == value))
    return OptimizationResult(delta, value, active, boundary, constraints, (lo, hi))


def certify(result: OptimizationResult, grid_points: int = 10_000) -> bool:
    """Exact checks: equality on the active set, a crossing certificate, and a grid sweep."""
    cons = result.constraints
    if not cons:
        raise ExponentError("empty constraint set")
    d, opt = result.delta_star, result.optimal_exponent
    values = {c.label: c.limit_at(d) for c in cons}
    if any(v is None for v in values.values()):
        return False
    if max(values.values()) != opt:
        return False
    if any((values[c.label] == opt) != (c.label in result.active_constraints) for c in cons):
        return False
    # No direction of motion can lower every active constraint at once.
    trends = {c.trend() for c in cons if c.label in result.active_constraints}
    lo, hi = result.interval
    if not result.boundary_optimal:
        if not ((-1 in trends and 1 in trends) or 0 in trends):
            return False
    elif (d == hi and 1 in trends) or (d == lo and -1 in trends):
        return False
    # On the grid delta_j = lo + j*step the test E(delta_j) >= opt reads
    # N - opt*(alpha + beta*lo) - opt*beta*step*j >= 0, linear in j; clear
    # denominators once so the sweep runs on integers.
    step = (hi - lo) / (grid_points + 1)
    lines = []
    for c in cons:
        a = c.N - opt * c.denominator(lo)
        b = opt * c.beta * step
        scale = math.lcm(a.denominator, b.denominator)
        lines.append((int(a * scale), int(b * scale)))
    for j in range(1, grid_points + 1):
        if not any(a - b * j >= 0 for a, b in lines):
            return False
    return True


def lambda_bound(result: OptimizationResult) -> int:
    """ceil(optimum) + 1; the extra unit absorbs the epsilon in P = M^(optimum + epsilon)."""
    return math.ceil(result.optimal_exponent) + 1


def load_constraints(text: str) -> tuple[list[ExponentConstraint], tuple[Fraction, Fraction]]:
    """Read a JSON list of constraints, or {"interval": [lo, hi], "constraints": [...]}."""
    data = json.loads(text)
    interval = DEFAULT_INTERVAL
    if isinstance(data, dict):
        if "interval" in data:
            interval = tuple(_frac(x) for x in data["interval"])
        data = data.get("constraints", [])
    if not isinstance(data, list):
        raise ExponentError("constraint file must hold a list")
    try:
        return [ExponentConstraint.from_json(obj) for obj in data], interval
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise ExponentError(f"malformed constraint: {exc}") from exc
