"""The M-good condition, checked prime by prime.

Condition I  (p = 1 mod 3): at most 9 pairwise parallel columns mod p.
Condition II (p = 2 mod 3): at least 3 pairwise non-parallel columns mod p.
Condition III (p = 3): exactly 1, or at least 3, distinct ratios mod 3.

Columns vanishing mod p (0/0) are parallel to everything, so for condition I a
maximal parallel set is one projective class together with every 0/0 column.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .core import FormPair, ProjectiveRatio, RatioKind, primes_up_to, ratios_mod_p, require_prime

PARALLEL_CAP = 9


@dataclass(frozen=True)
class PrimeVerdict:
    p: int
    condition: str  # "I", "II" or "III"
    satisfied: bool
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"p": self.p, "condition": self.condition,
                "satisfied": self.satisfied, "witness": self.witness}


@dataclass(frozen=True)
class MGoodReport:
    pair: FormPair
    prime_bound: int
    verdicts: tuple[PrimeVerdict, ...]
    is_mgood: bool
    notes: tuple[str, ...] = ()

    @property
    def failures(self) -> list[PrimeVerdict]:
        return [v for v in self.verdicts if not v.satisfied]

    def to_json(self, verbose: bool = False) -> dict:
        shown = self.verdicts if verbose else self.failures
        out = {"is_mgood": self.is_mgood, "prime_bound": self.prime_bound,
               "failures": [v.to_json() for v in self.failures]}
        if verbose:
            out["verdicts"] = [v.to_json() for v in shown]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _class_counts(pair: FormPair, p: int) -> tuple[Counter, list[int], dict]:
    ratios = ratios_mod_p(pair, p)
    counts: Counter = Counter()
    members: dict[ProjectiveRatio, list[int]] = {}
    both_zero = []
    for i, r in enumerate(ratios):
        if r.kind is RatioKind.BOTH_ZERO:
            both_zero.append(i)
        else:
            counts[r] += 1
            members.setdefault(r, []).append(i)
    return counts, both_zero, members


def check_condition_i(pair: FormPair, p: int) -> PrimeVerdict:
    require_prime(p)
    if p % 3 != 1:
        raise ValueError(f"condition I applies to p = 1 mod 3, got p = {p}")
    counts, both_zero, members = _class_counts(pair, p)
    t = len(both_zero)
    if counts:
        # Deterministic choice among equally large classes: smallest label.
        worst = max(sorted(counts), key=lambda r: counts[r])
        tally = counts[worst] + t
        indices = sorted(members[worst] + both_zero)
        label = str(worst)
    else:
        tally, indices, label = t, list(both_zero), "0/0"
    satisfied = tally <= PARALLEL_CAP and t <= PARALLEL_CAP
    witness = {}
    if not satisfied:
        witness = {"class": label, "parallel_count": tally, "both_zero": t,
                   "indices": indices}
    return PrimeVerdict(p, "I", satisfied, witness)


def _distinct_classes(pair: FormPair, p: int) -> list[str]:
    counts, _, _ = _class_counts(pair, p)
    return [str(r) for r in sorted(counts)]


def check_condition_ii(pair: FormPair, p: int) -> PrimeVerdict:
    require_prime(p)
    if p % 3 != 2:
        raise ValueError(f"condition II applies to p = 2 mod 3, got p = {p}")
    classes = _distinct_classes(pair, p)
    satisfied = len(classes) >= 3
    witness = {} if satisfied else {"distinct_classes": len(classes), "classes": classes}
    return PrimeVerdict(p, "II", satisfied, witness)


def check_condition_iii(pair: FormPair) -> PrimeVerdict:
    classes = _distinct_classes(pair, 3)
    # All columns 0/0 mod 3 is counted as a single ratio.
    count = max(len(classes), 1)
    satisfied = count != 2
    witness = {} if satisfied else {"distinct_classes": count, "classes": classes}
    if not classes:
        witness = {"policy": "all columns vanish mod 3; counted as one ratio"}
    return PrimeVerdict(3, "III", satisfied, witness)


def check_mgood(pair: FormPair, verbose: bool = False) -> MGoodReport:
    """Run conditions I and II over every prime p <= M^2 and condition III at p = 3."""
    bound = pair.M * pair.M
    verdicts = []
    for p in primes_up_to(bound):
        if p % 3 == 1:
            verdicts.append(check_condition_i(pair, p))
        elif p % 3 == 2:
            verdicts.append(check_condition_ii(pair, p))
    iii = check_condition_iii(pair)
    verdicts.append(iii)
    verdicts.sort(key=lambda v: v.p)
    notes = ()
    if "policy" in iii.witness:
        notes = (iii.witness["policy"],)
    is_mgood = all(v.satisfied for v in verdicts)
    if not verbose:
        verdicts = [v for v in verdicts if not v.satisfied]
    return MGoodReport(pair, bound, tuple(verdicts), is_mgood, notes)


def class_ids_batch(c: np.ndarray, d: np.ndarray, p: int) -> np.ndarray:
    """Vectorised class labels for residue arrays: 0..p-1 finite, p infinity, p+1 for 0/0."""
    c = np.asarray(c, dtype=np.int64) % p
    d = np.asarray(d, dtype=np.int64) % p
    inv = np.zeros(p, dtype=np.int64)
    for r in range(1, p):
        inv[r] = pow(r, -1, p)
    labels = (c * inv[d]) % p
    labels = np.where(d == 0, np.where(c == 0, p + 1, p), labels)
    return labels


def condition_holds_batch(c: np.ndarray, d: np.ndarray, p: int, condition: str) -> np.ndarray:
    """Evaluate one condition on many coefficient matrices at once.

    ``c`` and ``d`` have shape (trials, n).  Must agree with the scalar checkers;
    the test suite compares the two on random input.
    """
    labels = class_ids_batch(c, d, p)
    trials = labels.shape[0]
    k = p + 2
    flat = (np.arange(trials)[:, None] * k + labels).ravel()
    counts = np.bincount(flat, minlength=trials * k).reshape(trials, k)
    proper = counts[:, : p + 1]
    t = counts[:, p + 1]
    distinct = (proper > 0).sum(axis=1)
    if condition == "I":
        worst = proper.max(axis=1) + t
        return (worst <= PARALLEL_CAP) & (t <= PARALLEL_CAP)
    if condition == "II":
        return distinct >= 3
    if condition == "III":
        return distinct != 2
    raise ValueError(f"unknown condition {condition!r}")
