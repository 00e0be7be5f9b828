"""Exact local solution counts of F = G = 0 modulo prime powers.

Two independent routes are provided: full enumeration (``rho_bruteforce``) and a
convolution over the state (F mod q, G mod q) (``rho_dp``).  Counts are Python
integers; nothing in this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import prod

import numpy as np

from .core import FeasibilityError, FormPair, factorize, prime_power, ratio_class_id, require_prime

BRUTEFORCE_CAP = 10**8
DP_CAP = 500


@dataclass(frozen=True)
class Variant:
    """Which solutions are counted.

    ``all``: every solution; ``nonzero``: every coordinate a unit mod p;
    ``fixzero``: coordinate ``index`` equal to 0; ``lift``: some pair (i, j) has
    x_i x_j (c_i d_j - c_j d_i) a unit mod p (the lifting condition).
    """

    kind: str
    index: int | None = None

    def __post_init__(self):
        if self.kind not in ("all", "nonzero", "fixzero", "lift"):
            raise ValueError(f"unknown variant {self.kind!r}")
        if (self.kind == "fixzero") != (self.index is not None):
            raise ValueError("fixzero needs an index, other variants take none")

    @classmethod
    def parse(cls, text: str) -> "Variant":
        if text.startswith("fixzero"):
            _, _, idx = text.partition(":")
            return cls("fixzero", int(idx))
        return cls(text)

    def __str__(self):
        return f"fixzero:{self.index}" if self.kind == "fixzero" else self.kind


ALL = Variant("all")
NONZERO = Variant("nonzero")
LIFT = Variant("lift")


def fixzero(i: int) -> Variant:
    return Variant("fixzero", i)


@dataclass(frozen=True)
class LocalCount:
    p: int
    k: int
    variant: Variant
    value: int

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "variant": str(self.variant), "value": str(self.value)}


def _check_variant(pair: FormPair, variant: Variant) -> None:
    if variant.kind == "fixzero" and not 0 <= variant.index < pair.n:
        raise ValueError(f"index {variant.index} out of range for n = {pair.n}")


def nonparallel_pairs(pair: FormPair, p: int) -> list[tuple[int, int]]:
    return [(i, j) for i, j in combinations(range(pair.n), 2)
            if (pair.c[i] * pair.d[j] - pair.c[j] * pair.d[i]) % p]


# ---------------------------------------------------------------------------
# brute force

def rho_bruteforce(pair: FormPair, p: int, k: int, variant: Variant = ALL) -> LocalCount:
    """Count solutions mod p^k by enumerating all of (Z/p^k)^n."""
    require_prime(p)
    if k < 1:
        raise ValueError("k must be positive")
    _check_variant(pair, variant)
    q = p**k
    if q**pair.n > BRUTEFORCE_CAP:
        raise FeasibilityError(f"{q}^{pair.n} points exceeds the brute-force cap {BRUTEFORCE_CAP}")
    return LocalCount(p, k, variant, _enumerate(pair, p, q, variant))


def _enumerate(pair: FormPair, p: int, q: int, variant: Variant) -> int:
    n = pair.n
    # The last `tail` coordinates are vectorised; the rest are looped in Python.
    tail = 1
    while tail < n and q ** (tail + 1) <= 2_000_000:
        tail += 1
    head = n - tail
    grid = np.indices((q,) * tail).reshape(tail, -1).astype(np.int64)
    cubes_tail = [grid[t] ** 3 % q for t in range(tail)]
    c_tail = sum((pair.c[head + t] % q) * cubes_tail[t] % q for t in range(tail)) % q
    d_tail = sum((pair.d[head + t] % q) * cubes_tail[t] % q for t in range(tail)) % q
    unit_tail = [(grid[t] % p != 0).astype(bool) for t in range(tail)]
    zero_tail = [(grid[t] == 0).astype(bool) for t in range(tail)]
    pairs = nonparallel_pairs(pair, p) if variant.kind == "lift" else []

    total = 0
    for xs in product(range(q), repeat=head):
        f = sum(pair.c[i] * x**3 for i, x in enumerate(xs)) % q
        g = sum(pair.d[i] * x**3 for i, x in enumerate(xs)) % q
        mask = ((c_tail + f) % q == 0) & ((d_tail + g) % q == 0)
        if variant.kind == "nonzero":
            if any(x % p == 0 for x in xs):
                continue
            for t in range(tail):
                mask &= unit_tail[t]
        elif variant.kind == "fixzero":
            i = variant.index
            if i < head:
                if xs[i] != 0:
                    continue
            else:
                mask &= zero_tail[i - head]
        elif variant.kind == "lift":
            unit = [None] * n
            for i, x in enumerate(xs):
                unit[i] = x % p != 0
            for t in range(tail):
                unit[head + t] = unit_tail[t]
            ok = np.zeros_like(mask)
            for i, j in pairs:
                ok |= np.logical_and(unit[i], unit[j])
            mask &= ok
        total += int(mask.sum())
    return total


# ---------------------------------------------------------------------------
# dynamic programming

def _value_distribution(a: int, b: int, q: int, allowed) -> dict[tuple[int, int], int]:
    dist: dict[tuple[int, int], int] = {}
    for x in allowed:
        t = pow(x, 3, q)
        key = (a * t % q, b * t % q)
        dist[key] = dist.get(key, 0) + 1
    return dist


def _convolve(pair: FormPair, q: int, allowed_per_var) -> int:
    """Number of x with x_i in allowed_per_var[i] and F(x) = G(x) = 0 mod q."""
    state = np.zeros((q, q), dtype=object)
    state[0, 0] = 1
    for a, b, allowed in zip(pair.c, pair.d, allowed_per_var):
        dist = _value_distribution(a, b, q, allowed)
        new = np.zeros((q, q), dtype=object)
        for (s1, s2), mult in dist.items():
            shifted = np.roll(np.roll(state, s1, axis=0), s2, axis=1)
            new += shifted * mult if mult != 1 else shifted
        state = new
    return int(state[0, 0])


def rho_dp(pair: FormPair, q: int, variant: Variant = ALL) -> LocalCount:
    """Count solutions mod a prime power q by convolving per-variable value distributions."""
    pk = prime_power(q)
    if pk is None:
        raise ValueError(f"{q} is not a prime power; use rho_composite")
    if q > DP_CAP:
        raise FeasibilityError(f"modulus {q} exceeds the DP cap {DP_CAP}")
    _check_variant(pair, variant)
    p, k = pk
    return LocalCount(p, k, variant, _count_dp(pair, p, q, variant))


def _count_dp(pair: FormPair, p: int, q: int, variant: Variant) -> int:
    everything = range(q)
    units = [x for x in everything if x % p]
    multiples = [x for x in everything if x % p == 0]
    n = pair.n
    if variant.kind == "all":
        return _convolve(pair, q, [everything] * n)
    if variant.kind == "nonzero":
        return _convolve(pair, q, [units] * n)
    if variant.kind == "fixzero":
        allowed = [everything] * n
        allowed[variant.index] = [0]
        return _convolve(pair, q, allowed)
    return _count_lift_dp(pair, p, q, everything, multiples)


def _count_lift_dp(pair: FormPair, p: int, q: int, everything, multiples) -> int:
    # Complement of the lifting condition: the coordinates that are units mod p
    # all sit in columns from a single projective class together with 0/0 columns.
    # Writing N(T) for the count with x_i = 0 mod p outside T, the events
    # "support in K + Z" for distinct classes K pairwise intersect in
    # "support in Z", so the complement is sum_K N(K + Z) - (m - 1) N(Z).
    n = pair.n
    labels = [ratio_class_id(a, b, p) for a, b in zip(pair.c, pair.d)]
    zero_cols = {i for i in range(n) if labels[i] == p + 1}
    classes = sorted({lab for lab in labels if lab != p + 1})

    def restricted(free: set[int]) -> int:
        return _convolve(pair, q, [everything if i in free else multiples for i in range(n)])

    total = _convolve(pair, q, [everything] * n)
    n_zero = restricted(zero_cols)
    if not classes:
        return total - n_zero
    complement = sum(restricted(zero_cols | {i for i in range(n) if labels[i] == lab})
                     for lab in classes)
    complement -= (len(classes) - 1) * n_zero
    return total - complement


def rho_composite(pair: FormPair, q: int, variant: Variant = ALL) -> int:
    """Count solutions mod an arbitrary q by multiplying prime-power counts (CRT)."""
    if variant.kind == "lift":
        raise ValueError("the lifting count is only defined modulo prime powers")
    if q == 1:
        return 1
    return prod(rho_dp(pair, p**e, variant).value for p, e in factorize(q).items())


def rank2_linear_count(pair: FormPair, p: int) -> LocalCount:
    """rho(p) = p^(n - rank) when cubing is a bijection mod p (p = 3 or p = 2 mod 3)."""
    from .core import rank_mod_p

    require_prime(p)
    if not (p == 3 or p % 3 == 2):
        raise ValueError(f"cubing is not a bijection mod {p}")
    return LocalCount(p, 1, ALL, p ** (pair.n - rank_mod_p(pair, p)))


# ---------------------------------------------------------------------------
# Hensel lifting

@dataclass(frozen=True)
class LiftWitness:
    p: int
    k: int
    base: tuple[int, ...]
    indices: tuple[int, int]
    correction: tuple[int, int]
    lifted: tuple[int, ...]
    residuals: tuple[int, int]  # F(y) - lam and G(y) - mu, exactly


class LiftError(ValueError):
    pass


def hensel_lift(pair: FormPair, x, i: int, j: int, p: int, k: int,
                target: tuple[int, int] = (0, 0)) -> LiftWitness:
    """Lift a solution of F = lam, G = mu mod p^k to one mod p^(k+1), moving x_i and x_j.

    For p != 3 the step is x + K p^k with (K_i, K_j) the unique solution of the
    linearised 2x2 system mod p.  For p = 3 the step is x + K 3^(k-1), which needs k >= 2.
    """
    require_prime(p)
    lam, mu = target
    x = tuple(int(v) for v in x)
    if len(x) != pair.n:
        raise LiftError(f"expected {pair.n} coordinates")
    if i == j:
        raise LiftError("indices must differ")
    if p == 3 and k < 2:
        raise LiftError("for p = 3 lifting starts at k = 2 (mod 9)")
    if k < 1:
        raise LiftError("k must be positive")
    qk = p**k
    F, G = pair.evaluate(x)
    if (F - lam) % qk or (G - mu) % qk:
        raise LiftError(f"x is not a solution mod {p}^{k}")
    det = pair.c[i] * pair.d[j] - pair.c[j] * pair.d[i]
    if (x[i] * x[j] * det) % p == 0:
        raise LiftError("lifting condition fails: x_i x_j det is divisible by p")
    ci, cj, di, dj = pair.c[i], pair.c[j], pair.d[i], pair.d[j]
    factor = 3 if p != 3 else 1
    # Matrix [[f ci xi^2, f cj xj^2], [f di xi^2, f dj xj^2]] K = -(F-lam, G-mu)/p^k mod p.
    m11, m12 = factor * ci * x[i] ** 2, factor * cj * x[j] ** 2
    m21, m22 = factor * di * x[i] ** 2, factor * dj * x[j] ** 2
    r1, r2 = -((F - lam) // qk), -((G - mu) // qk)
    mdet = (m11 * m22 - m12 * m21) % p
    inv = pow(mdet, -1, p)
    Ki = (r1 * m22 - m12 * r2) * inv % p
    Kj = (m11 * r2 - m21 * r1) * inv % p
    step = qk if p != 3 else p ** (k - 1)
    y = list(x)
    y[i] += Ki * step
    y[j] += Kj * step
    mod = p ** (k + 1)
    y = tuple(v % mod for v in y)
    Fy, Gy = pair.evaluate(y)
    if (Fy - lam) % mod or (Gy - mu) % mod:
        raise AssertionError("lift failed to solve the system mod p^(k+1)")
    return LiftWitness(p, k, x, (i, j), (Ki, Kj), y, (Fy - lam, Gy - mu))


def _solutions(pair: FormPair, q: int) -> np.ndarray:
    pts = np.indices((q,) * pair.n).reshape(pair.n, -1).T.astype(np.int64)
    cubes = (pts**3) % q
    f = (cubes @ np.array([a % q for a in pair.c], dtype=np.int64)) % q
    g = (cubes @ np.array([b % q for b in pair.d], dtype=np.int64)) % q
    return pts[(f == 0) & (g == 0)]


def _qualifies(pair: FormPair, x, p: int, pairs) -> bool:
    return any(x[i] % p and x[j] % p for i, j in pairs)


@dataclass(frozen=True)
class LiftingReport:
    p: int
    k: int
    n: int
    qualifying: int
    expected: int | None          # p^(n-2) for p != 3
    extension_counts: dict[int, int]  # number of extensions -> how many base solutions

    @property
    def holds(self) -> bool:
        if self.qualifying == 0:
            return True
        if self.expected is not None:
            return set(self.extension_counts) == {self.expected}
        return min(self.extension_counts) >= 1

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "n": self.n, "qualifying": self.qualifying,
                "expected": self.expected, "holds": self.holds,
                "extension_counts": {str(a): b for a, b in sorted(self.extension_counts.items())}}


def verify_lifting_count(pair: FormPair, p: int, k: int) -> LiftingReport:
    """Exhaustively count extensions mod p^(k+1) of each qualifying solution mod p^k.

    For p != 3 an extension is y = x + p^k z; for p = 3 it is y = x + 3^(k-1) z,
    matching the two lifting steps.
    """
    require_prime(p)
    if p == 3 and k < 2:
        raise ValueError("for p = 3 use k >= 2")
    q_next = p ** (k + 1)
    if q_next**pair.n > BRUTEFORCE_CAP:
        raise FeasibilityError("lifting check exceeds the brute-force cap")
    q = p**k
    step = q if p != 3 else p ** (k - 1)
    span = q_next // step
    pairs = nonparallel_pairs(pair, p)
    z = np.indices((span,) * pair.n).reshape(pair.n, -1).T.astype(object)
    cvec = np.array(pair.c, dtype=object)
    dvec = np.array(pair.d, dtype=object)
    counts: dict[int, int] = {}
    qualifying = 0
    for x in _solutions(pair, q):
        if not _qualifies(pair, x, p, pairs):
            continue
        qualifying += 1
        y = np.array([int(v) for v in x], dtype=object) + step * z
        cubes = y**3
        ok = ((cubes @ cvec) % q_next == 0) & ((cubes @ dvec) % q_next == 0)
        ext = int(ok.sum())
        counts[ext] = counts.get(ext, 0) + 1
    expected = p ** (pair.n - 2) if p != 3 else None
    return LiftingReport(p, k, pair.n, qualifying, expected, counts)


# ---------------------------------------------------------------------------
# the mod 9 computer check and the counterexamples

def cube_classes_mod9() -> dict[int, int]:
    """x^3 mod 9 depends only on x mod 3."""
    return {r: pow(r, 3, 9) for r in range(3)}


@dataclass(frozen=True)
class Mod9Report:
    checked: int
    skipped: int
    failures: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"checked": self.checked, "skipped": self.skipped,
                "failures": [list(f) for f in self.failures]}


def verify_mod9_lemma() -> Mod9Report:
    """Every (c, d) mod 9 with three pairwise distinct ratios mod 3 has a zero mod 9
    with at least two coordinates prime to 3."""
    # Candidate cube vectors: x mod 3 with at least two non-zero coordinates.
    cube = cube_classes_mod9()
    cands = np.array([[cube[r] for r in xs] for xs in product(range(3), repeat=3)
                      if sum(1 for r in xs if r) >= 2], dtype=np.int64)
    grid = np.indices((9,) * 6).reshape(6, -1).T.astype(np.int64)
    c, d = grid[:, :3], grid[:, 3:]
    # Ratio class of each column mod 3: labels 0,1,2 finite, 3 infinity, 4 for 0/0.
    inv3 = np.array([0, 1, 2], dtype=np.int64)
    cm, dm = c % 3, d % 3
    lab = np.where(dm == 0, np.where(cm == 0, 4, 3), (cm * inv3[dm]) % 3)
    distinct = ((lab[:, 0] != lab[:, 1]) & (lab[:, 0] != lab[:, 2]) & (lab[:, 1] != lab[:, 2])
                & (lab != 4).all(axis=1))
    c, d = c[distinct], d[distinct]
    f = (c @ cands.T) % 9
    g = (d @ cands.T) % 9
    solved = ((f == 0) & (g == 0)).any(axis=1)
    bad = np.concatenate([c[~solved], d[~solved]], axis=1)
    return Mod9Report(int(distinct.sum()), int((~distinct).sum()),
                      tuple(tuple(int(v) for v in row) for row in bad))


def mod7_counterexample() -> FormPair:
    """Five columns, pairwise non-parallel mod 7, whose only common zero mod 7 is 0."""
    return FormPair((1, 0, 2, 4, 6), (0, 1, 2, 2, 2))


def noncube_counterexample(p: int) -> FormPair:
    """x1^3 = 0 and x2^3 - k x3^3 = 0 with k the least non-cube mod p (p = 1 mod 3)."""
    require_prime(p)
    if p % 3 != 1:
        raise ValueError("non-cubes exist only for p = 1 mod 3")
    cubes = {pow(x, 3, p) for x in range(1, p)}
    k = min(r for r in range(2, p) if r not in cubes)
    return FormPair((1, 0, 0), (0, 1, -k))
