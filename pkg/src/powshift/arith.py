"""Exact integer arithmetic primitives.

Primality (deterministic for the full 64-bit range), a smallest-prime-factor
table, factorization, smoothness tests, perfect-power detection and
shifted-prime products.  Everything here is pure; a PrimeTable is read-only
after construction and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import BudgetExceeded, IncompleteFactorization, NonpositiveShiftValue

# Sufficient witness set for deterministic Miller-Rabin below 2^64
# (Sorenson & Webster; first twelve primes).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_U64 = 1 << 64

# Hard ceiling on table size; ~4 bytes per entry for the spf map.
DEFAULT_TABLE_LIMIT_BUDGET = 10**8


def is_prime(m: int) -> bool:
    """Deterministic primality test for 0 <= m < 2^64.

    Miller-Rabin with a fixed witness set that is exhaustive below 2^64,
    so the answer is a certificate, not a probability.
    """
    if m >= _U64:
        raise ValueError(f"is_prime requires m < 2^64, got {m}")
    if m < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if m % p == 0:
            return m == p
    d = m - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_BASES:
        x = pow(a, d, m)
        if x == 1 or x == m - 1:
            continue
        for _ in range(s - 1):
            x = x * x % m
            if x == m - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Complete prime factorization of a positive integer.

    factors is a tuple of (prime, exponent) pairs with strictly increasing
    primes; the empty tuple represents 1.
    """

    value: int
    factors: Tuple[Tuple[int, int], ...]

    def reassemble(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def max_prime(self) -> int:
        """Largest prime factor; 1 for the empty factorization."""
        return self.factors[-1][0] if self.factors else 1

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


class PrimeTable:
    """Primes up to `limit` plus a smallest-prime-factor map.

    Immutable after construction.  `spf[m]` is the least prime divisor of m
    for 2 <= m <= limit (and spf[p] = p for primes).
    """

    def __init__(self, limit: int, spf: np.ndarray, primes: np.ndarray):
        self.limit = limit
        self.spf = spf
        self.primes = primes

    def smallest_prime_factor(self, m: int) -> int:
        if not 2 <= m <= self.limit:
            raise ValueError(f"m={m} outside table range [2, {self.limit}]")
        return int(self.spf[m])

    def primes_up_to(self, y: float) -> np.ndarray:
        """View of the primes <= y (y may exceed limit only if harmlessly so)."""
        hi = int(np.searchsorted(self.primes, math.floor(y), side="right"))
        return self.primes[:hi]

    def pi(self, y: float) -> int:
        """Prime-counting function for y <= limit."""
        return len(self.primes_up_to(y))

    def prime_rank(self, p: int) -> int:
        """0-based rank of prime p in the table (2 has rank 0)."""
        i = int(np.searchsorted(self.primes, p))
        if i >= len(self.primes) or self.primes[i] != p:
            raise ValueError(f"{p} is not a prime in the table")
        return i


def build_prime_table(limit: int, memory_limit: int = DEFAULT_TABLE_LIMIT_BUDGET) -> PrimeTable:
    """Sieve a PrimeTable up to `limit` (inclusive)."""
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if limit > memory_limit:
        raise BudgetExceeded(f"table limit {limit} exceeds memory budget {memory_limit}")
    spf = np.zeros(limit + 1, dtype=np.int32 if limit < 2**31 else np.int64)
    for i in range(2, math.isqrt(limit) + 1):
        if spf[i] == 0:
            block = spf[i * i :: i]
            block[block == 0] = i
    idx = np.arange(limit + 1, dtype=spf.dtype)
    unmarked = (spf == 0) & (idx >= 2)
    spf[unmarked] = idx[unmarked]
    primes = idx[(spf == idx) & (idx >= 2)].astype(np.int64)
    return PrimeTable(limit, spf, primes)


def prime_mask(limit: int) -> np.ndarray:
    """Boolean primality mask for 0..limit; cheap companion to PrimeTable
    when only membership is needed (family scans, S(N) sums)."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return mask


def factorize(m: int, table: PrimeTable) -> Factorization:
    """Full factorization of m >= 1.

    Factors within table reach come from the spf map; a remaining cofactor
    is accepted if it certifies prime under is_prime, otherwise
    IncompleteFactorization is raised.
    """
    if m < 1:
        raise ValueError(f"factorize requires m >= 1, got {m}")
    factors = []
    rem = m
    spf = table.spf
    while 1 < rem <= table.limit:
        p = int(spf[rem])
        e = 0
        while rem % p == 0:
            rem //= p
            e += 1
        factors.append((p, e))
    if rem > 1:
        # Cofactor beyond the table: peel small primes, then certify.
        for p in map(int, table.primes):
            if p * p > rem:
                break
            if rem % p == 0:
                e = 0
                while rem % p == 0:
                    rem //= p
                    e += 1
                factors.append((p, e))
        if rem > 1:
            if rem < _U64 and is_prime(rem):
                factors.append((int(rem), 1))
            else:
                raise IncompleteFactorization(m, rem)
    factors.sort()
    return Factorization(m, tuple(factors))


def is_smooth(m: int, y: float, table: PrimeTable) -> bool:
    """True iff every prime factor of m is <= y (m = 1 is vacuously smooth)."""
    if m < 1:
        raise ValueError(f"is_smooth requires m >= 1, got {m}")
    rem = m
    spf = table.spf
    while rem > 1:
        if rem <= table.limit:
            p = int(spf[rem])
        elif is_prime(rem):
            p = rem
        else:
            return is_smooth_slow(rem, y, table)
        if p > y:
            return False
        while rem % p == 0:
            rem //= p
    return True


def is_smooth_slow(m: int, y: float, table: PrimeTable) -> bool:
    # Fallback for composite cofactors beyond table reach: divide out all
    # primes <= y; smooth iff nothing remains.
    rem = m
    for p in map(int, table.primes_up_to(y)):
        while rem % p == 0:
            rem //= p
        if rem == 1:
            return True
    return rem == 1


def integer_nth_root(m: int, r: int) -> int:
    """Floor of the r-th root of m >= 0, exact on arbitrary precision.

    Binary search on bit length; result verified by re-powering at call
    sites that need exactness.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if m < 0:
        raise ValueError("m must be >= 0")
    if m < 2 or r == 1:
        return m
    hi = 1 << (m.bit_length() // r + 1)
    lo = 1
    while lo < hi - 1:
        mid = (lo + hi) // 2
        if mid**r <= m:
            lo = mid
        else:
            hi = mid
    return lo


def is_perfect_power(m: int, r: int) -> Tuple[bool, Optional[int]]:
    """Whether m = b^r for some integer b >= 1; returns (flag, b or None)."""
    if r < 2:
        raise ValueError("r must be >= 2")
    if m < 1:
        raise ValueError(f"is_perfect_power requires m >= 1, got {m}")
    b = integer_nth_root(m, r)
    if b**r == m:
        return True, b
    return False, None


def shifted_product(primes: Iterable[int], a: int) -> int:
    """Exact product of (p + a) over distinct primes p; empty product is 1."""
    ps = list(primes)
    if len(set(ps)) != len(ps):
        raise ValueError("primes must be distinct")
    out = 1
    for p in ps:
        v = p + a
        if v <= 0:
            raise NonpositiveShiftValue(f"p + a = {p} + {a} = {v} <= 0")
        out *= v
    return out


def euler_phi_sieve(limit: int) -> np.ndarray:
    """phi(a) for all a <= limit, by the standard multiplicative sieve."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p prime
            phi[p::p] -= phi[p::p] // p
    return phi
