"""Small nontrivial zeros of a form pair inside a box.

Two strategies:

* equal-ratio: columns sharing a rational ratio c_i/d_i are integer multiples
  lambda_i (u, v) of one primitive column, so any zero of sum lambda_i x_i^3 on
  that block kills both forms at once;
* meet-in-the-middle on a small support: hash the (F, G) values of one half of
  the variables and look up the negated values of the other half.

Every reported vector is re-evaluated exactly before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

from .core import FeasibilityError, FormPair, FormPairError, RationalRatio, ratio_classes

MITM_CAP = 10**8          # bound on B^ceil(s/2) for a meet-in-the-middle scan
BLOCK_WORK_CAP = 2 * 10**6  # (2B+1)^half for equal-ratio block scans
MAX_SUPPORT = 6
MAX_BLOCK = 7


@dataclass(frozen=True)
class SearchResult:
    solution: tuple[int, ...] | None
    sup_norm: int | None
    strategy: str
    nodes_explored: int
    notes: tuple[str, ...] = ()

    @property
    def found(self) -> bool:
        return self.solution is not None

    def to_json(self) -> dict:
        return {"solution": list(self.solution) if self.solution else None,
                "sup_norm": self.sup_norm, "strategy": self.strategy,
                "nodes_explored": self.nodes_explored, "notes": list(self.notes)}


def verify_solution(pair: FormPair, x) -> bool:
    x = [int(v) for v in x]
    if len(x) != pair.n:
        raise FormPairError(f"solution has length {len(x)}, pair has n = {pair.n}")
    if not any(x):
        return False
    return pair.evaluate(x) == (0, 0)


def _sup(v) -> int:
    return max((abs(t) for t in v), default=0)


def _mitm(rows: list[tuple[int, ...]], B: int) -> tuple[tuple[int, ...] | None, int]:
    """Nonzero x in [-B, B]^s with sum_k row[k] x_k^3 = 0 for every row, minimal sup-norm.

    Returns (x or None, half-vectors enumerated).  Among minimal solutions the
    first one met scanning the right half lexicographically is kept.
    """
    s = len(rows[0])
    h = s // 2
    rng = range(-B, B + 1)
    cubes = [x**3 for x in rng]
    # left half: for every value key, the smallest-sup vector (first in lexicographic order)
    best_left: dict[tuple[int, ...], tuple[int, tuple[int, ...]]] = {}
    best_left_nonzero_zero_key: tuple[int, tuple[int, ...]] | None = None
    nodes = 0
    zero_key = (0,) * len(rows)
    for idx in product(range(2 * B + 1), repeat=h):
        nodes += 1
        key = tuple(sum(r[k] * cubes[i] for k, i in enumerate(idx)) for r in rows)
        vec = tuple(i - B for i in idx)
        sup = _sup(vec)
        cur = best_left.get(key)
        if cur is None or sup < cur[0]:
            best_left[key] = (sup, vec)
        if key == zero_key and any(vec):
            if best_left_nonzero_zero_key is None or sup < best_left_nonzero_zero_key[0]:
                best_left_nonzero_zero_key = (sup, vec)
    best = None
    for idx in product(range(2 * B + 1), repeat=s - h):
        nodes += 1
        key = tuple(-sum(r[h + k] * cubes[i] for k, i in enumerate(idx)) for r in rows)
        vec = tuple(i - B for i in idx)
        if any(vec):
            hit = best_left.get(key)
        else:
            hit = best_left_nonzero_zero_key
        if hit is None:
            continue
        cand = hit[1] + vec
        sup = max(hit[0], _sup(vec))
        if best is None or sup < best[0]:
            best = (sup, cand)
    return (best[1] if best else None), nodes


def _class_multipliers(ratio: RationalRatio, pair: FormPair, idx) -> list[int]:
    """lambda_i with (c_i, d_i) = lambda_i (u, v) for the primitive column (u, v)."""
    u, v = (1, 0) if ratio.is_infinite else (ratio.num, ratio.den)
    return [pair.c[i] // u if u else pair.d[i] // v for i in idx]


def _icbrt(n: int) -> int | None:
    """Exact integer cube root of n, or None when n is not a cube."""
    m = abs(n)
    lo, hi = 0, 1 << (m.bit_length() // 3 + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**3 < m:
            lo = mid + 1
        else:
            hi = mid
    if lo**3 != m:
        return None
    return -lo if n < 0 else lo


def _pair_zero(l1: int, l2: int, B: int) -> tuple[int, int] | None:
    """Smallest-sup (a, b), a > 0, with l1 a^3 + l2 b^3 = 0 and |a|, |b| <= B."""
    best = None
    for a in range(1, B + 1):
        num = -l1 * a**3
        if num % l2:
            continue
        b = _icbrt(num // l2)
        if b is None or b == 0 or abs(b) > B:
            continue
        if best is None or max(a, abs(b)) < max(best[0], abs(best[1])):
            best = (a, b)
    return best


def search_equal_ratio(pair: FormPair, B: int) -> SearchResult:
    if B <= 0:
        raise ValueError("bound B must be positive")
    classes = [(r, idx) for r, idx in ratio_classes(pair).items() if len(idx) >= 2]
    if not classes:
        raise FormPairError("no ratio class of multiplicity >= 2")
    best = None  # (sup, solution, strategy)
    nodes = 0
    notes = []
    for ratio, idx in classes:
        lam = _class_multipliers(ratio, pair, idx)
        for (i, li), (j, lj) in combinations(zip(idx, lam), 2):
            nodes += B
            hit = _pair_zero(li, lj, B)
            if hit is None:
                continue
            x = [0] * pair.n
            x[i], x[j] = hit
            sup = max(abs(hit[0]), abs(hit[1]))
            if best is None or sup < best[0]:
                best = (sup, tuple(x), "EqualRatioPair")
    for ratio, idx in classes:
        if len(idx) < 3:
            continue
        block = idx[:MAX_BLOCK]
        work = (2 * B + 1) ** math.ceil(len(block) / 2)
        if work > BLOCK_WORK_CAP:
            notes.append(f"block {list(block)} skipped: (2B+1)^{math.ceil(len(block) / 2)} = {work}")
            continue
        lam = _class_multipliers(ratio, pair, block)
        sol, used = _mitm([tuple(lam)], B)
        nodes += used
        if sol is None:
            continue
        x = [0] * pair.n
        for i, v in zip(block, sol):
            x[i] = v
        sup = _sup(sol)
        if best is None or sup < best[0]:
            best = (sup, tuple(x), "EqualRatioSeven")
    if best is None:
        return SearchResult(None, None, "EqualRatioPair", nodes, tuple(notes))
    if not verify_solution(pair, best[1]):
        raise AssertionError("equal-ratio search produced a non-solution")
    return SearchResult(best[1], best[0], best[2], nodes, tuple(notes))


def search_meet_in_middle(pair: FormPair, support, B: int) -> SearchResult:
    support = sorted(set(int(i) for i in support))
    s = len(support)
    if not 1 <= s <= MAX_SUPPORT:
        raise FeasibilityError(f"support size must be between 1 and {MAX_SUPPORT}, got {s}")
    if any(not 0 <= i < pair.n for i in support):
        raise FormPairError("support index out of range")
    if B <= 0:
        raise ValueError("bound B must be positive")
    if B ** math.ceil(s / 2) > MITM_CAP:
        raise FeasibilityError(f"B^ceil(s/2) = {B ** math.ceil(s / 2)} exceeds {MITM_CAP}")
    rows = [tuple(pair.c[i] for i in support), tuple(pair.d[i] for i in support)]
    sol, nodes = _mitm(rows, B)
    strategy = f"MeetInMiddle({s})"
    if sol is None:
        return SearchResult(None, None, strategy, nodes)
    x = [0] * pair.n
    for i, v in zip(support, sol):
        x[i] = v
    if not verify_solution(pair, x):
        raise AssertionError("meet-in-the-middle produced a non-solution")
    return SearchResult(tuple(x), _sup(sol), strategy, nodes)


@dataclass(frozen=True)
class ProfileRow:
    strategy: str
    best_sup_norm: int | None
    bound: int
    nodes_explored: int
    solution: tuple[int, ...] | None = None


@dataclass(frozen=True)
class LambdaProfile:
    rows: tuple[ProfileRow, ...]
    M: int
    theorem_exponent: int = 2328

    @property
    def best(self) -> int | None:
        found = [r.best_sup_norm for r in self.rows if r.best_sup_norm is not None]
        return min(found) if found else None

    @property
    def within_theorem_bound(self) -> bool | None:
        b = self.best
        return None if b is None else b <= self.M**self.theorem_exponent

    def to_json(self) -> dict:
        return {"M": self.M, "best_sup_norm": self.best,
                "within_M_power_bound": self.within_theorem_bound,
                "rows": [{"strategy": r.strategy, "best_sup_norm": r.best_sup_norm,
                          "bound": r.bound, "nodes_explored": r.nodes_explored,
                          "solution": list(r.solution) if r.solution else None}
                         for r in self.rows]}


def _bounds_up_to(B_max: int) -> list[int]:
    out, b = [], 1
    while b < B_max:
        out.append(b)
        b *= 2
    return out + [B_max]


def lambda_profile(pair: FormPair, B_max: int, max_support: int = 4) -> LambdaProfile:
    """Run each strategy with doubling bounds until it finds a zero or reaches B_max."""
    if B_max <= 0:
        raise ValueError("B_max must be positive")
    rows = []
    if any(len(idx) >= 2 for idx in ratio_classes(pair).values()):
        nodes = 0
        for B in _bounds_up_to(B_max):
            res = search_equal_ratio(pair, B)
            nodes += res.nodes_explored
            if res.found:
                break
        rows.append(ProfileRow(res.strategy, res.sup_norm, B, nodes, res.solution))
    for s in range(2, min(max_support, MAX_SUPPORT, pair.n) + 1):
        nodes, best, used = 0, None, None
        for B in _bounds_up_to(B_max):
            if B ** math.ceil(s / 2) > MITM_CAP:
                break
            used = B
            for support in combinations(range(pair.n), s):
                res = search_meet_in_middle(pair, support, B)
                nodes += res.nodes_explored
                if res.found and (best is None or res.sup_norm < best.sup_norm):
                    best = res
            if best is not None:
                break
        rows.append(ProfileRow(f"MeetInMiddle({s})", best.sup_norm if best else None,
                               used or 0, nodes, best.solution if best else None))
    return LambdaProfile(tuple(rows), pair.M)
