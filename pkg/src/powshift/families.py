"""Prime families a^r * n +/- 1 and the S(N) statistic.

Scanning n <= N for families holding at least r primes, assembling their
products into members with exactly r prime factors, and evaluating the
weighted prime sum S(N) together with the Mertens-type constant that
governs its main term.

Sign orientation: primes l = a^r n + 1 satisfy phi(l) = a^r n, so the +1
family targets the totient (phi an r-th power); primes l = a^r n - 1
satisfy sigma(l) = a^r n and target the sum of divisors.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arith import PrimeTable, euler_phi_sieve, prime_mask
from .construct import CandidateRecord
from .errors import RangeOverflow

_U64 = 1 << 64

# phi for sign +1 families, sigma for sign -1 families
TARGET_FUNCTION = {+1: "phi", -1: "sigma"}


def scan_width(N: int, r: int) -> int:
    """H = ceil(r ln N); the ceiling keeps H >= 1 for all N >= 2."""
    return math.ceil(r * math.log(N))


@dataclass(frozen=True)
class FamilyRecord:
    """One n whose family {a^r n + sign : a <= H} contains primes."""

    n: int
    sign: int
    H: int
    hits: Tuple[int, ...]  # the a-values with a^r n + sign prime

    def primes(self, r: int) -> Tuple[int, ...]:
        return tuple(a**r * self.n + self.sign for a in self.hits)


def _scan_shard(lo: int, hi: int, r: int, sign: int, H: int) -> List[Tuple[int, Tuple[int, ...]]]:
    """Hits for n in [lo, hi]; pure, so shards merge by concatenation."""
    limit = H**r * hi + 1
    mask = prime_mask(limit)
    n_arr = np.arange(lo, hi + 1, dtype=np.int64)
    hit_rows = np.empty((H, len(n_arr)), dtype=bool)
    for a in range(1, H + 1):
        vals = a**r * n_arr + sign
        row = np.zeros(len(n_arr), dtype=bool)
        ok = vals >= 2
        row[ok] = mask[vals[ok]]
        hit_rows[a - 1] = row
    out: List[Tuple[int, Tuple[int, ...]]] = []
    for j in np.nonzero(hit_rows.any(axis=0))[0]:
        hits = tuple(int(a) + 1 for a in np.nonzero(hit_rows[:, j])[0])
        out.append((int(n_arr[j]), hits))
    return out


def family_scan(
    N: int,
    r: int,
    sign: int,
    table: Optional[PrimeTable] = None,
    jobs: int = 1,
    n_start: int = 1,
) -> List[FamilyRecord]:
    """One FamilyRecord per n in [n_start, N] with at least one prime hit.

    Records with >= r hits form the family collection the assembler uses.
    Sharded by n-ranges; output is independent of the shard geometry.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if N < 3:
        raise ValueError("N must be >= 3")
    H = scan_width(N, r)
    if H**r * N + 1 >= _U64:
        raise RangeOverflow(f"a^r N + 1 = {H ** r * N + 1} exceeds 64 bits")
    if n_start > N:
        return []
    shard_count = max(1, min(jobs, N - n_start + 1))
    bounds = np.linspace(n_start - 1, N, shard_count + 1, dtype=np.int64)
    shards = [(int(a) + 1, int(b)) for a, b in zip(bounds, bounds[1:]) if b > a]
    if jobs > 1 and len(shards) > 1:
        los, his = zip(*shards)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_scan_shard, los, his,
                                  itertools.repeat(r), itertools.repeat(sign),
                                  itertools.repeat(H)))
    else:
        parts = [_scan_shard(lo, hi, r, sign, H) for lo, hi in shards]
    records = [FamilyRecord(n, sign, H, hits) for part in parts for n, hits in part]
    records.sort(key=lambda rec: rec.n)
    return records


@dataclass
class AssemblyResult:
    records: List[CandidateRecord]
    duplicate_prime_skips: int
    max_multiplicity: int  # largest pre-dedupe multiplicity of a prime set


def assemble_products(
    records: Sequence[FamilyRecord],
    r: int,
    sign: int,
) -> AssemblyResult:
    """Products of r distinct family primes, verified and deduplicated.

    For each record with >= r hits and each r-subset {a_1 < ... < a_r},
    the product of l_i = a_i^r n + sign has phi (sign +1) resp. sigma
    (sign -1) equal to (a_1 ... a_r n)^r; the identity is re-verified from
    the primes themselves.  Identical prime sets arising from different n
    collapse to one record; their multiplicity is tracked (it can never
    exceed H).
    """
    by_key: Dict[Tuple[int, ...], CandidateRecord] = {}
    multiplicity: Dict[Tuple[int, ...], int] = {}
    dup_skips = 0
    for rec in records:
        if len(rec.hits) < r or rec.sign != sign:
            continue
        for combo in itertools.combinations(rec.hits, r):
            primes = tuple(a**r * rec.n + sign for a in combo)
            if len(set(primes)) < r:
                dup_skips += 1
                continue
            key = tuple(sorted(primes))
            multiplicity[key] = multiplicity.get(key, 0) + 1
            if key in by_key:
                continue
            n_star = math.prod(primes)
            root = math.prod(combo) * rec.n
            # Independent check of the construction identity.
            if sign == +1:
                target = math.prod(p - 1 for p in primes)  # phi of squarefree
            else:
                target = math.prod(p + 1 for p in primes)  # sigma of squarefree
            if target != root**r:  # pragma: no cover
                raise AssertionError(
                    f"family identity failed for n={rec.n}, a={combo}"
                )
            by_key[key] = CandidateRecord(
                n=n_star,
                prime_factors=key,
                roots=((-sign, root),),
                provenance=(
                    ("family_n", rec.n),
                    ("family_sign", sign),
                    ("family_a", combo),
                    ("H", rec.H),
                    ("target", TARGET_FUNCTION[sign]),
                ),
            )
    out = sorted(by_key.values(), key=lambda c: c.n)
    max_mult = max(multiplicity.values(), default=0)
    return AssemblyResult(out, dup_skips, max_mult)


@dataclass
class SStatistic:
    """The weighted prime sum S(N) with its parts.

    value = prime_sum - penalty, where prime_sum is the double sum of the
    Chebyshev theta-weight over family values and penalty is
    N (r-1) ln(H^r N + 1).  prime_sum_swapped is the same double sum
    evaluated in (a, residue-class) order; the two must agree closely.
    """

    N: int
    r: int
    sign: int
    H: int
    value: float
    prime_sum: float
    prime_sum_swapped: float
    penalty: float
    c_truncated: float

    @property
    def predicted_coefficient(self) -> float:
        """c r - r + 1, the leading coefficient of S(N)/(N ln N)."""
        return self.c_truncated * self.r - self.r + 1

    @property
    def normalized(self) -> float:
        return self.value / (self.N * math.log(self.N))


def s_statistic(
    N: int,
    r: int,
    sign: int,
    table: Optional[PrimeTable] = None,
    c_cutoff: int = 10**5,
) -> SStatistic:
    """Evaluate S(N) exactly, in both summation orders.

    (n, a) order walks the families; (a, residue-class) order walks primes
    congruent to sign mod a^r.  Both use one shared primality mask; the
    float accumulation orders differ, hence the stated 1e-6 relative
    tolerance between them.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    if N < 3:
        raise ValueError("N must be >= 3")
    H = scan_width(N, r)
    limit = H**r * N + 1
    if limit >= _U64:
        raise RangeOverflow(f"H^r N + 1 = {limit} exceeds 64 bits")
    mask = prime_mask(limit)

    # (n, a) order, chunked over n.
    prime_sum = 0.0
    chunk = 1 << 16
    for lo in range(1, N + 1, chunk):
        n_arr = np.arange(lo, min(lo + chunk - 1, N) + 1, dtype=np.int64)
        acc = 0.0
        for a in range(1, H + 1):
            vals = a**r * n_arr + sign
            vals = vals[vals >= 2]
            pv = vals[mask[vals]]
            if len(pv):
                acc += float(np.log(pv.astype(np.float64)).sum())
        prime_sum += acc

    # (a, residue-class) order over the prime list.
    primes = np.nonzero(mask)[0].astype(np.int64)
    swapped = 0.0
    for a in range(1, H + 1):
        q = a**r
        lo_val = q + sign
        hi_val = q * N + sign
        sel = primes[(primes >= max(2, lo_val)) & (primes <= hi_val)]
        sel = sel[(sel - sign) % q == 0]
        if len(sel):
            swapped += float(np.log(sel.astype(np.float64)).sum())

    penalty = N * (r - 1) * math.log(H**r * N + 1)
    return SStatistic(
        N=N,
        r=r,
        sign=sign,
        H=H,
        value=prime_sum - penalty,
        prime_sum=prime_sum,
        prime_sum_swapped=swapped,
        penalty=penalty,
        c_truncated=mertens_constant(c_cutoff, table),
    )


def mertens_constant(cutoff: int, table: Optional[PrimeTable] = None) -> float:
    """Truncated product over primes p <= cutoff of (1 + 1/(p(p-1)))."""
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    if table is not None and table.limit >= cutoff:
        primes = table.primes_up_to(cutoff)
    else:
        primes = np.nonzero(prime_mask(cutoff))[0]
    p = primes.astype(np.float64)
    return float(np.exp(np.log1p(1.0 / (p * (p - 1.0))).sum()))


def totient_ratio_sum(H: int, table: Optional[PrimeTable] = None) -> float:
    """Sum of a / phi(a) for a <= H (asymptotically c H)."""
    if H < 1:
        raise ValueError("H must be >= 1")
    phi = euler_phi_sieve(H)
    a = np.arange(1, H + 1, dtype=np.float64)
    return float((a / phi[1:].astype(np.float64)).sum())


# -- checkpoint persistence (one record per line: n sign H a,a,a) -----------

def write_checkpoint(path: str, records: Sequence[FamilyRecord],
                     N: int, r: int, sign: int, completed_through: int) -> None:
    with open(path, "w") as fh:
        fh.write(f"# powshift family checkpoint\n")
        fh.write(f"# N: {N}\n# r: {r}\n# sign: {sign:+d}\n")
        fh.write(f"# completed_through: {completed_through}\n")
        for rec in records:
            hits = ",".join(map(str, rec.hits))
            fh.write(f"{rec.n} {rec.sign:+d} {rec.H} {hits}\n")


def load_checkpoint(path: str) -> Tuple[Dict[str, int], List[FamilyRecord]]:
    meta: Dict[str, int] = {}
    records: List[FamilyRecord] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body:
                    key, _, val = body.partition(":")
                    try:
                        meta[key.strip()] = int(val)
                    except ValueError:
                        pass
                continue
            n_s, sign_s, h_s, hits_s = line.split()
            records.append(FamilyRecord(int(n_s), int(sign_s), int(h_s),
                                        tuple(int(t) for t in hits_s.split(","))))
    return meta, records
