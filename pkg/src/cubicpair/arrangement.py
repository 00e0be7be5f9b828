"""Preprocessing of a 16-variable pair before the circle method is applied.

* detect a ratio repeated at least 7 times (that case is handled separately);
* split the indices into a 10-set A and a 6-set B with controlled ratio repetition;
* build a positive real point eta on the linear system sum c_i t_i = sum d_i t_i = 0;
* run the Euclidean-style reduction when all columns share one ratio mod 3.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .core import FormPair, RationalRatio, RatioKind, ratio_classes, ratios_mod_p

HEAVY_MULTIPLICITY = 7
A_SIZE, B_SIZE = 10, 6
A_CAP, B_CAP = 4, 2

# The four ways six ratios can fill B, keyed by the sorted multiplicity profile.
B_PATTERNS = {
    (2, 2, 1, 1): "r_a r_b r_a r_b r_c r_d",
    (2, 2, 2): "r_a r_b r_a r_b r_c r_c",
    (2, 1, 1, 1, 1): "r_a r_b r_c r_d r_e r_e",
    (1, 1, 1, 1, 1, 1): "r_a r_b r_c r_d r_e r_f",
}

# Constants used to certify the size of eta concretely.
ETA_UPPER_FACTOR = 40
ETA_LOWER_FACTOR = Fraction(1, 4)


class ArrangementError(ValueError):
    pass


def detect_heavy_ratio(pair: FormPair) -> tuple[RationalRatio, list[int]] | None:
    """Return the first ratio class (by smallest index) of size >= 7, with all its indices."""
    for ratio, idx in ratio_classes(pair).items():
        if len(idx) >= HEAVY_MULTIPLICITY:
            return ratio, idx
    return None


@dataclass(frozen=True)
class PartitionAB:
    A: tuple[int, ...]
    B: tuple[int, ...]
    b_pattern: str

    @property
    def order(self) -> tuple[int, ...]:
        """Reindexing: A first, then B in pattern order."""
        return self.A + self.B


def _split_counts(sizes: list[int]) -> list[int] | None:
    """Choose how many members of each class go to B (backtracking, largest take first)."""
    m = len(sizes)
    choice = [0] * m

    def rec(i: int, left: int) -> bool:
        if i == m:
            return left == 0 and sum(1 for b in choice if b) >= 3
        # Remaining capacity check prunes dead branches early.
        if left > B_CAP * (m - i):
            return False
        lo = max(0, sizes[i] - A_CAP)
        for b in range(min(B_CAP, sizes[i], left), lo - 1, -1):
            choice[i] = b
            if rec(i + 1, left - b):
                return True
        choice[i] = 0
        return False

    return list(choice) if rec(0, B_SIZE) else None


def split_profile(sizes: list[int]) -> list[int] | None:
    """Public form of the B-count search for a multiplicity profile."""
    return _split_counts(list(sizes))


def _pattern_order(groups: list[list[int]]) -> tuple[list[int], str]:
    """Order B's indices so the ratio sequence matches one of the four patterns."""
    doubles = [g for g in groups if len(g) == 2]
    singles = [g for g in groups if len(g) == 1]
    profile = tuple(sorted((len(g) for g in groups), reverse=True))
    if profile == (2, 2, 1, 1):
        a, b = doubles
        order = [a[0], b[0], a[1], b[1], singles[0][0], singles[1][0]]
    elif profile == (2, 2, 2):
        a, b, c = doubles
        order = [a[0], b[0], a[1], b[1], c[0], c[1]]
    elif profile == (2, 1, 1, 1, 1):
        order = [g[0] for g in singles] + doubles[0]
    elif profile == (1, 1, 1, 1, 1, 1):
        order = [g[0] for g in singles]
    else:
        raise ArrangementError(f"unexpected B profile {profile}")
    return order, B_PATTERNS[profile]


def partition_ab(pair: FormPair) -> PartitionAB:
    if pair.n != A_SIZE + B_SIZE:
        raise ArrangementError(f"partition needs n = 16, got n = {pair.n}")
    classes = sorted(ratio_classes(pair).values(), key=lambda idx: (-len(idx), idx[0]))
    heavy = [idx for idx in classes if len(idx) >= HEAVY_MULTIPLICITY]
    if heavy:
        raise ArrangementError(
            f"ratio repeated {len(heavy[0])} times; use detect_heavy_ratio instead")
    counts = _split_counts([len(idx) for idx in classes])
    if counts is None:
        raise ArrangementError("no admissible A/B split exists")
    a_idx, groups = [], []
    for idx, b in zip(classes, counts):
        if b:
            groups.append(idx[-b:])
        a_idx.extend(idx[: len(idx) - b])
    b_order, pattern = _pattern_order(groups)
    return PartitionAB(tuple(sorted(a_idx)), tuple(b_order), pattern)


def verify_partition(pair: FormPair, part: PartitionAB) -> bool:
    """Independent check of the two A/B requirements."""
    if sorted(part.A + part.B) != list(range(pair.n)):
        return False
    if len(part.A) != A_SIZE or len(part.B) != B_SIZE:
        return False
    a_classes = ratio_classes(pair.subpair(part.A))
    b_classes = ratio_classes(pair.subpair(part.B))
    return (all(len(v) <= A_CAP for v in a_classes.values())
            and len(b_classes) >= 3
            and all(len(v) <= B_CAP for v in b_classes.values()))


@dataclass(frozen=True)
class EtaVector:
    eta: tuple[Fraction, ...]
    sign_flips: tuple[int, ...]
    columns: tuple[int, ...]        # original column index of each eta entry
    c: tuple[int, ...]              # sign-normalized coefficients, aligned with eta
    d: tuple[int, ...]
    multipliers: tuple[int, ...]    # the chosen x_1..x_10 in {1, 2}

    def residuals(self) -> tuple[Fraction, Fraction]:
        return (sum((a * e for a, e in zip(self.c, self.eta)), Fraction(0)),
                sum((b * e for b, e in zip(self.d, self.eta)), Fraction(0)))

    def within_bounds(self, M: int) -> bool:
        lo = ETA_LOWER_FACTOR / (M * M)
        hi = ETA_UPPER_FACTOR * M * M
        return all(lo <= e <= hi for e in self.eta[10:]) and all(e in (1, 2) for e in self.eta[:10])


def _det(a, b, c, d) -> int:
    return a * d - b * c


def eta_vector(pair: FormPair, partition: PartitionAB | None = None) -> EtaVector:
    """Solve for a positive point on c.t = d.t = 0 over the first 12 (reindexed) columns.

    x_1..x_10 start at 1; if the right-hand side (n1, n2) vanishes or is parallel to
    column 11 or 12, coordinates are bumped to 2 one at a time in index order, then
    all of {1,2}^10 is scanned.  Columns 11 and 12 then follow from Cramer's rule and
    are sign-normalized.
    """
    cols = list(partition.order[:12]) if partition is not None else list(range(12))
    if pair.n < 12:
        raise ArrangementError(f"need at least 12 columns, got {pair.n}")
    c = [pair.c[i] for i in cols]
    d = [pair.d[i] for i in cols]
    det = _det(c[10], c[11], d[10], d[11])
    if det == 0:
        raise ArrangementError("columns 11 and 12 are parallel (determinant zero)")

    def acceptable(xs):
        n1 = -sum(a * x for a, x in zip(c[:10], xs))
        n2 = -sum(b * x for b, x in zip(d[:10], xs))
        if n1 == 0 and n2 == 0:
            return None
        if _det(n1, c[11], n2, d[11]) == 0 or _det(c[10], n1, d[10], n2) == 0:
            return None
        return n1, n2

    def candidates():
        base = [1] * 10
        yield tuple(base)
        for i in range(10):
            trial = list(base)
            trial[i] = 2
            yield tuple(trial)
        yield from product((1, 2), repeat=10)

    for xs in candidates():
        rhs = acceptable(xs)
        if rhs is not None:
            break
    else:
        raise ArrangementError("no choice of x_1..x_10 in {1,2} gives a usable right-hand side")
    n1, n2 = rhs
    x11 = Fraction(_det(n1, c[11], n2, d[11]), det)
    x12 = Fraction(_det(c[10], n1, d[10], n2), det)
    eta = [Fraction(x) for x in xs] + [x11, x12]
    flips = []
    for i in (10, 11):
        if eta[i] < 0:
            eta[i], c[i], d[i] = -eta[i], -c[i], -d[i]
            flips.append(i)
    return EtaVector(tuple(eta), tuple(flips), tuple(cols), tuple(c), tuple(d), tuple(xs))


@dataclass(frozen=True)
class ReductionStep:
    replaced: str                  # "upper" or "lower" row
    multiplier: int                # s in row = s * other + 3 * remainder
    remainder: tuple[int, ...]


@dataclass(frozen=True)
class ReductionTrace:
    start: tuple[tuple[int, ...], tuple[int, ...]]
    steps: tuple[ReductionStep, ...]
    final: tuple[tuple[int, ...], tuple[int, ...]] | None
    failure: str | None = None

    @property
    def succeeded(self) -> bool:
        return self.final is not None


def _sup(v) -> int:
    return max((abs(x) for x in v), default=0)


def _proportional_mod3(u, v) -> int | None:
    """s in {0, 1, -1} with u = s*v mod 3, or None."""
    for s in (0, 1, -1):
        if all((a - s * b) % 3 == 0 for a, b in zip(u, v)):
            return s
    return None


def rank1_mod3_reduce(pair: FormPair, max_steps: int = 10_000) -> ReductionTrace:
    """Replace rows by (row - s*other)/3 until one row vanishes.

    Each step keeps the rational row space, so the zero set of the pair is
    unchanged.  If a later pair of rows is no longer proportional mod 3 the trace
    ends with a failure marker.
    """
    classes = {r for r in ratios_mod_p(pair, 3) if r.kind is not RatioKind.BOTH_ZERO}
    if len(classes) > 1:
        raise ArrangementError(f"{len(classes)} distinct ratio classes mod 3; need exactly 1")
    rows = [list(pair.c), list(pair.d)]
    target = 0   # index of the row reduced next; alternates like the Euclidean algorithm
    steps = []
    for _ in range(max_steps):
        if not any(rows[0]) or not any(rows[1]):
            return ReductionTrace((pair.c, pair.d), tuple(steps), (tuple(rows[0]), tuple(rows[1])))
        u, v = rows[target], rows[1 - target]
        s = _proportional_mod3(u, v)
        if s is None:
            # Other direction: v vanishes mod 3 while u does not.
            s = _proportional_mod3(v, u)
            if s is None:
                return ReductionTrace((pair.c, pair.d), tuple(steps), None,
                                      failure="rows are independent mod 3")
            target = 1 - target
            u, v = v, u
        rem = [(a - s * b) // 3 for a, b in zip(u, v)]
        rows[target] = rem
        steps.append(ReductionStep("upper" if target == 0 else "lower", s, tuple(rem)))
        target = 1 - target
    return ReductionTrace((pair.c, pair.d), tuple(steps), None, failure="step limit reached")
