"""Brute-force ground truth by exhaustive enumeration.

Enumerate every squarefree n <= x whose shifted-prime products are perfect
r-th powers (optionally restricted to exactly r prime factors), via a
segmented sieve that factors whole intervals at once.  A slow exact sweep
backs the vectorized path as an independent oracle and as a fallback when
int64 products could overflow.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arith import PrimeTable, build_prime_table, factorize, is_perfect_power, prime_mask
from .construct import verify_membership
from .errors import BudgetExceeded, NonpositiveShiftValue
from .harvest import ShiftSet

DEFAULT_ENUMERATION_CEILING = 10**7

_INT64_SAFE = 2**62


def _max_omega(x: int) -> int:
    prod, w = 1, 0
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43):
        if prod * p > x:
            break
        prod *= p
        w += 1
    return max(w, 1)


def _fast_path_safe(x: int, shifts: Sequence[int]) -> bool:
    bound = x * (1 + max(abs(a) for a in shifts)) ** _max_omega(x)
    return bound < _INT64_SAFE


def _rth_power_mask(vals: np.ndarray, r: int) -> np.ndarray:
    """Vectorized b^r == v test on positive int64 values (float seed,
    +/-1 correction)."""
    out = np.zeros(len(vals), dtype=bool)
    pos = vals >= 1
    v = vals[pos].astype(np.float64)
    b = np.rint(np.power(v, 1.0 / r)).astype(np.int64)
    ok = np.zeros(len(b), dtype=bool)
    for delta in (-1, 0, 1):
        cand = b + delta
        good = cand >= 1
        ok |= good & (np.where(good, cand, 1) ** r == vals[pos])
    out[pos] = ok
    return out


def _sweep_shard(
    lo: int,
    hi: int,
    shifts: Tuple[int, ...],
    r: int,
    omega_exact: Optional[int],
) -> List[int]:
    """Members of the target set inside [lo, hi]; pure per shard."""
    size = hi - lo + 1
    n_arr = np.arange(lo, hi + 1, dtype=np.int64)
    rem = n_arr.copy()
    squarefree = np.ones(size, dtype=bool)
    excluded = np.zeros(size, dtype=bool)
    omega = np.zeros(size, dtype=np.int16)
    vals = np.ones((len(shifts), size), dtype=np.int64)

    root_limit = math.isqrt(hi)
    small = np.nonzero(prime_mask(root_limit))[0] if root_limit >= 2 else []
    for p in map(int, small):
        start = ((lo + p - 1) // p) * p
        if start > hi:
            continue
        sl = slice(start - lo, size, p)
        omega[sl] += 1
        rem[sl] //= p
        again = rem[sl] % p == 0
        if again.any():
            squarefree_slice = squarefree[sl]
            squarefree_slice[again] = False
            block = rem[sl]
            while again.any():
                block[again] //= p
                again = block % p == 0
        for j, a in enumerate(shifts):
            v = p + a
            if v <= 0:
                excluded[sl] = True
            else:
                vals[j, sl] *= v

    # What remains after removing factors <= sqrt(hi) is 1 or a single prime.
    large = rem > 1
    omega[large] += 1
    for j, a in enumerate(shifts):
        if a < 0:
            excluded |= large & (rem <= -a)
        vals[j, large] *= rem[large] + a

    cand = squarefree & ~excluded
    if lo <= 0:
        cand[: 1 - lo] = False  # n >= 1 only
    if omega_exact is not None:
        cand &= omega == omega_exact
    for j in range(len(shifts)):
        idx = np.nonzero(cand)[0]
        if not len(idx):
            break
        good = _rth_power_mask(vals[j, idx], r)
        cand[idx[~good]] = False
    return [int(n) for n in n_arr[np.nonzero(cand)[0]]]


def _enumerate(
    x: int,
    shifts: Tuple[int, ...],
    r: int,
    omega_exact: Optional[int],
    jobs: int,
    ceiling: int,
) -> List[int]:
    if x < 1:
        raise ValueError("x must be >= 1")
    if x > ceiling:
        raise BudgetExceeded(f"x={x} exceeds enumeration ceiling {ceiling}")
    if not _fast_path_safe(x, shifts):
        table = build_prime_table(x)
        return _enumerate_exact(x, shifts, r, omega_exact, table)
    shard_count = max(1, min(jobs, x))
    bounds = np.linspace(0, x, shard_count + 1, dtype=np.int64)
    shards = [(int(a) + 1, int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
    if jobs > 1 and len(shards) > 1:
        los, his = zip(*shards)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_sweep_shard, los, his,
                                  itertools.repeat(shifts), itertools.repeat(r),
                                  itertools.repeat(omega_exact)))
    else:
        parts = [_sweep_shard(lo, hi, shifts, r, omega_exact) for lo, hi in shards]
    return [n for part in parts for n in part]


def _enumerate_exact(
    x: int,
    shifts: Tuple[int, ...],
    r: int,
    omega_exact: Optional[int],
    table: PrimeTable,
) -> List[int]:
    """Exact per-n sweep; the independent oracle for the vectorized path."""
    A = ShiftSet(tuple(shifts))
    out = []
    for n in range(1, x + 1):
        if omega_exact is not None:
            f = factorize(n, table)
            if len(f.factors) != omega_exact or not f.is_squarefree():
                continue
        ok, _ = verify_membership(n, A, r, table)
        if ok:
            out.append(n)
    return out


def enumerate_B(
    x: int,
    A: ShiftSet,
    r: int,
    table: Optional[PrimeTable] = None,
    include_trivial: bool = True,
    jobs: int = 1,
    ceiling: int = DEFAULT_ENUMERATION_CEILING,
) -> List[int]:
    """All squarefree n <= x whose products prod(p + a) are r-th powers,
    for every shift a.  Sorted; deterministic under any shard count."""
    members = _enumerate(x, A.shifts, r, None, jobs, ceiling)
    if not include_trivial:
        members = [n for n in members if not _is_trivial(n, A, r, table)]
    return members


def enumerate_Bstar(
    x: int,
    sign: int,
    r: int,
    table: Optional[PrimeTable] = None,
    jobs: int = 1,
    ceiling: int = DEFAULT_ENUMERATION_CEILING,
) -> List[int]:
    """Squarefree n <= x with exactly r prime factors whose totient
    (sign -1) or divisor sum (sign +1) is a perfect r-th power."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    return _enumerate(x, (sign,), r, r, jobs, ceiling)


def _is_trivial(n: int, A: ShiftSet, r: int, table: Optional[PrimeTable]) -> bool:
    if n == 1:
        return True
    if table is None or table.limit < n:
        table = build_prime_table(max(n, 4))
    ok, roots = verify_membership(n, A, r, table)
    return bool(ok) and all(b == 1 for b in roots.values())


@dataclass
class CensusReport:
    """Counts and empirical density exponents over an increasing x-grid."""

    x_grid: Tuple[int, ...]
    counts: Tuple[int, ...]
    exponents: Tuple[Optional[float], ...]
    params: Dict[str, object]

    def rows(self) -> List[Tuple[int, int, Optional[float]]]:
        return list(zip(self.x_grid, self.counts, self.exponents))


def density_exponents(
    x_grid: Sequence[int],
    counts: Sequence[int],
    params: Optional[Dict[str, object]] = None,
) -> CensusReport:
    """Per-bound empirical exponent log(count)/log(x); zero counts yield a
    flagged (None) exponent rather than a fake value."""
    if list(x_grid) != sorted(set(x_grid)):
        raise ValueError("x_grid must be strictly increasing")
    if len(x_grid) != len(counts):
        raise ValueError("grid and counts must align")
    exps: List[Optional[float]] = []
    for x, c in zip(x_grid, counts):
        if c < 1:
            exps.append(None)
        elif x <= 1:
            raise ValueError("grid points must exceed 1")
        else:
            exps.append(math.log(c) / math.log(x))
    return CensusReport(tuple(x_grid), tuple(counts), tuple(exps), dict(params or {}))


def census_grid(
    x_grid: Sequence[int],
    A: ShiftSet,
    r: int,
    include_trivial: bool = True,
    jobs: int = 1,
    ceiling: int = DEFAULT_ENUMERATION_CEILING,
) -> Tuple[List[int], CensusReport]:
    """Enumerate once at max(grid) and report counts at every grid point."""
    top = max(x_grid)
    members = enumerate_B(top, A, r, include_trivial=include_trivial,
                          jobs=jobs, ceiling=ceiling)
    arr = np.asarray(members, dtype=np.int64)
    counts = [int(np.searchsorted(arr, x, side="right")) for x in x_grid]
    report = density_exponents(
        x_grid, counts,
        {"shifts": A.shifts, "r": r, "include_trivial": include_trivial},
    )
    return members, report
