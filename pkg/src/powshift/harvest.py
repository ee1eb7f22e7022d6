"""Smooth-shift harvesting.

Collect primes p <= x whose shifted values p + a are simultaneously y-smooth
for every shift a, together with the mod-r exponent vector of each such
prime.  This is the raw material for the subset constructor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .arith import Factorization, PrimeTable, factorize, is_smooth
from .errors import SmoothnessViolated
from .groups import ExponentVector


@dataclass(frozen=True)
class ShiftSet:
    """Ordered set of distinct nonzero integer shifts a_1 < ... < a_s."""

    shifts: Tuple[int, ...]

    def __post_init__(self):
        if not self.shifts:
            raise ValueError("shift set must be nonempty")
        if 0 in self.shifts:
            raise ValueError("shifts must be nonzero")
        if any(b <= a for a, b in zip(self.shifts, self.shifts[1:])):
            raise ValueError("shifts must be strictly increasing")

    @property
    def s(self) -> int:
        return len(self.shifts)

    @classmethod
    def of(cls, *shifts: int) -> "ShiftSet":
        return cls(tuple(sorted(shifts)))


@dataclass(frozen=True)
class HarvestedPrime:
    """One harvested prime with the factorization of every shifted value."""

    p: int
    shift_factorizations: Tuple[Factorization, ...]
    vector: ExponentVector


def _shift_smooth(value: int, y: float, table: PrimeTable) -> bool:
    # Fast path over the spf chain; p + max(A) can straddle the table edge.
    rem = value
    spf = table.spf
    limit = table.limit
    while rem > 1:
        if rem > limit:
            return is_smooth(rem, y, table)
        p = int(spf[rem])
        if p > y:
            return False
        while rem % p == 0:
            rem //= p
    return True


def exponent_vector(
    shift_factorizations: Sequence[Factorization],
    y: float,
    r: int,
    table: PrimeTable,
) -> ExponentVector:
    """Mod-r exponent vector of one prime's shifted values.

    Layout is shift-major: for each shift in order, t = pi(y) coordinates
    indexed by the rank of the prime among the primes <= y.
    """
    small = table.primes_up_to(y)
    t = len(small)
    entries: List[int] = []
    for f in shift_factorizations:
        block = [0] * t
        for p, e in f.factors:
            if p > y:
                raise SmoothnessViolated(f"factor {p} of {f.value} exceeds y={y}")
            block[table.prime_rank(p)] = e % r
        entries.extend(block)
    return ExponentVector(tuple(entries), r)


def harvest(
    x: int,
    y: float,
    A: ShiftSet,
    r: int,
    table: PrimeTable,
) -> List[HarvestedPrime]:
    """All primes p <= x with every p + a y-smooth (and p + a >= 1).

    Primes with any p + a <= 0 are skipped silently; ordering is by p.
    """
    if y < 2:
        raise ValueError(f"need y >= 2, got y={y}")
    if x > table.limit:
        raise ValueError(f"x={x} beyond table limit {table.limit}")
    shifts = A.shifts
    low_cut = -min(shifts)  # skip p <= -min(A) when negative shifts present
    out: List[HarvestedPrime] = []
    for p in map(int, table.primes_up_to(x)):
        if p <= low_cut:
            continue
        if all(_shift_smooth(p + a, y, table) for a in shifts):
            fs = tuple(factorize(p + a, table) for a in shifts)
            out.append(HarvestedPrime(p, fs, exponent_vector(fs, y, r, table)))
    return out


def pi_F(x: int, y: float, A: ShiftSet, table: PrimeTable) -> int:
    """|{p <= x : every p + a is y-smooth}|, without storing factorizations."""
    if x > table.limit:
        raise ValueError(f"x={x} beyond table limit {table.limit}")
    shifts = A.shifts
    low_cut = -min(shifts)
    count = 0
    for p in map(int, table.primes_up_to(x)):
        if p <= low_cut:
            continue
        if all(_shift_smooth(p + a, y, table) for a in shifts):
            count += 1
    return count
