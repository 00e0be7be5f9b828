"""Coefficient pairs of diagonal cubic forms and the ratio bookkeeping around them.

A pair is stored as two integer rows ``c`` and ``d``; column ``i`` is the
vector ``(c[i], d[i])``.  Everything here is exact integer arithmetic.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence


class FormPairError(ValueError):
    """Raised for malformed or degenerate coefficient input."""


class FeasibilityError(ValueError):
    """Raised when a requested computation exceeds a hard size cap."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0 or n % 3 == 0:
        return False
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


@dataclass(frozen=True)
class FormPair:
    """Coefficients of F = sum c_i x_i^3 and G = sum d_i x_i^3."""

    c: tuple[int, ...]
    d: tuple[int, ...]
    n: int = field(init=False)
    M: int = field(init=False)

    def __post_init__(self):
        c = tuple(int(v) for v in self.c)
        d = tuple(int(v) for v in self.d)
        if len(c) == 0:
            raise FormPairError("a pair needs at least one variable (n = 0)")
        if len(c) != len(d):
            raise FormPairError(f"row lengths differ: {len(c)} != {len(d)}")
        for j, (cj, dj) in enumerate(zip(c, d)):
            if cj == 0 and dj == 0:
                raise FormPairError(f"zero column at index {j}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "n", len(c))
        object.__setattr__(self, "M", max(abs(v) for v in c + d))

    @classmethod
    def from_columns(cls, columns: Iterable[tuple[int, int]]) -> "FormPair":
        cols = list(columns)
        return cls(tuple(a for a, _ in cols), tuple(b for _, b in cols))

    def columns(self) -> list[tuple[int, int]]:
        return list(zip(self.c, self.d))

    def evaluate(self, x: Sequence[int]) -> tuple[int, int]:
        if len(x) != self.n:
            raise ValueError(f"expected {self.n} values, got {len(x)}")
        cubes = [int(v) ** 3 for v in x]
        return (sum(a * t for a, t in zip(self.c, cubes)),
                sum(b * t for b, t in zip(self.d, cubes)))

    def subpair(self, indices: Sequence[int]) -> "FormPair":
        return FormPair(tuple(self.c[i] for i in indices),
                        tuple(self.d[i] for i in indices))

    def to_json(self) -> dict:
        return {"n": self.n, "c": [_json_int(v) for v in self.c],
                "d": [_json_int(v) for v in self.d]}


def _json_int(v: int):
    # JSON consumers often read numbers as doubles; keep big ones exact.
    return v if -(2**63) <= v < 2**63 else str(v)


def _parse_int(v) -> int:
    if isinstance(v, bool):
        raise FormPairError(f"not an integer: {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v.strip())
        except ValueError:
            raise FormPairError(f"not an integer: {v!r}") from None
    if isinstance(v, float) and v.is_integer():
        return int(v)
    raise FormPairError(f"not an integer: {v!r}")


def parse_form_pair(text: str) -> FormPair:
    """Parse a pair from JSON ``{"n", "c", "d"}`` or two-row CSV (c row, then d row)."""
    text = text.strip()
    if not text:
        raise FormPairError("empty input")
    if text[0] == "{":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormPairError(f"malformed JSON: {exc}") from None
        try:
            n = _parse_int(obj["n"])
            c = [_parse_int(v) for v in obj["c"]]
            d = [_parse_int(v) for v in obj["d"]]
        except (KeyError, TypeError) as exc:
            raise FormPairError(f"missing or malformed field: {exc}") from None
        if n != len(c) or n != len(d):
            raise FormPairError(f"n = {n} does not match row lengths {len(c)}, {len(d)}")
        return FormPair(tuple(c), tuple(d))
    rows = [r for r in csv.reader(io.StringIO(text)) if any(cell.strip() for cell in r)]
    if len(rows) != 2:
        raise FormPairError(f"CSV input needs exactly two rows, got {len(rows)}")
    c = [_parse_int(v) for v in rows[0]]
    d = [_parse_int(v) for v in rows[1]]
    return FormPair(tuple(c), tuple(d))


class RatioKind(Enum):
    FINITE = "finite"
    INFINITY = "infinity"
    BOTH_ZERO = "both_zero"


@dataclass(frozen=True)
class ProjectiveRatio:
    """Class of a column in P^1(F_p), plus a separate class for columns vanishing mod p."""

    p: int
    kind: RatioKind
    r: int | None = None

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> tuple[int, int]:
        # Finite residues first, then infinity, then 0/0.
        if self.kind is RatioKind.FINITE:
            return (0, self.r)
        return (1, 0) if self.kind is RatioKind.INFINITY else (2, 0)

    def __str__(self):
        if self.kind is RatioKind.FINITE:
            return str(self.r)
        return "inf" if self.kind is RatioKind.INFINITY else "0/0"

    @classmethod
    def of(cls, c: int, d: int, p: int) -> "ProjectiveRatio":
        cm, dm = c % p, d % p
        if dm:
            return cls(p, RatioKind.FINITE, cm * pow(dm, -1, p) % p)
        if cm:
            return cls(p, RatioKind.INFINITY)
        return cls(p, RatioKind.BOTH_ZERO)


def ratios_mod_p(pair: FormPair, p: int) -> list[ProjectiveRatio]:
    require_prime(p)
    return [ProjectiveRatio.of(a, b, p) for a, b in zip(pair.c, pair.d)]


def ratio_class_id(c: int, d: int, p: int) -> int:
    """Integer label of a column's class mod p: residues 0..p-1, p for infinity, p+1 for 0/0."""
    cm, dm = c % p, d % p
    if dm:
        return cm * pow(dm, -1, p) % p
    return p if cm else p + 1


@dataclass(frozen=True)
class RationalRatio:
    """Reduced c/d over Q; ``den == 0`` encodes infinity (with ``num == 1``)."""

    num: int
    den: int

    @classmethod
    def of(cls, c: int, d: int) -> "RationalRatio":
        if d == 0:
            if c == 0:
                raise FormPairError("0/0 has no rational ratio")
            return cls(1, 0)
        g = gcd(c, d)
        num, den = c // g, d // g
        if den < 0:
            num, den = -num, -den
        return cls(num, den)

    @property
    def is_infinite(self) -> bool:
        return self.den == 0

    def as_fraction(self) -> Fraction:
        if self.is_infinite:
            raise ValueError("infinite ratio")
        return Fraction(self.num, self.den)

    def __str__(self):
        if self.is_infinite:
            return "inf"
        return str(self.num) if self.den == 1 else f"{self.num}/{self.den}"


def ratio_multiset(pair: FormPair) -> dict[RationalRatio, int]:
    """Multiplicity of each rational ratio c_i/d_i, in order of first appearance."""
    out: dict[RationalRatio, int] = {}
    for a, b in zip(pair.c, pair.d):
        r = RationalRatio.of(a, b)
        out[r] = out.get(r, 0) + 1
    return out


def ratio_classes(pair: FormPair) -> dict[RationalRatio, list[int]]:
    out: dict[RationalRatio, list[int]] = {}
    for i, (a, b) in enumerate(zip(pair.c, pair.d)):
        out.setdefault(RationalRatio.of(a, b), []).append(i)
    return out


@dataclass(frozen=True)
class PrimeList:
    bound: int
    primes: tuple[int, ...]

    @property
    def residues(self) -> tuple[int, ...]:
        return tuple(p % 3 for p in self.primes)

    def with_residue(self, r: int) -> list[int]:
        return [p for p in self.primes if p % 3 == r]

    def __iter__(self):
        return iter(self.primes)

    def __len__(self):
        return len(self.primes)


def sieve(bound: int) -> list[int]:
    if bound < 2:
        return []
    bs = bytearray(b"\x01") * (bound + 1)
    bs[0:2] = b"\x00\x00"
    for q in range(2, isqrt(bound) + 1):
        if bs[q]:
            bs[q * q::q] = b"\x00" * ((bound - q * q) // q + 1)
    return [i for i, v in enumerate(bs) if v]


def primes_up_to(bound: int) -> PrimeList:
    if bound < 0:
        raise ValueError("bound must be non-negative")
    return PrimeList(bound, tuple(sieve(bound)))


def factorize(q: int) -> dict[int, int]:
    """Trial-division factorization; only used on small moduli."""
    if q < 1:
        raise ValueError("q must be positive")
    out: dict[int, int] = {}
    f = 2
    while f * f <= q:
        while q % f == 0:
            out[f] = out.get(f, 0) + 1
            q //= f
        f += 1 if f == 2 else 2
    if q > 1:
        out[q] = out.get(q, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, k) with q = p**k, or None."""
    fac = factorize(q) if q > 1 else {}
    if len(fac) != 1:
        return None
    (p, k), = fac.items()
    return p, k


def rank_mod_p(pair: FormPair, p: int) -> int:
    """Rank over F_p of the 2 x n coefficient matrix."""
    cols = [(a % p, b % p) for a, b in zip(pair.c, pair.d)]
    nonzero = [col for col in cols if col != (0, 0)]
    if not nonzero:
        return 0
    a0, b0 = nonzero[0]
    for a, b in nonzero[1:]:
        if (a0 * b - a * b0) % p:
            return 2
    return 1
