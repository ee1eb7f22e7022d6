"""Finite abelian group machinery for (Z/rZ)^d.

Exact Davenport-type constant by exhaustive state search, the van Emde
Boas-Kruyswijk upper bound, zero-sum subset search over exponent vectors,
and the combinatorial lower bound on the number of zero-sum subsequences.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded, DomainError

# Exhaustion guard for the exact Davenport search; larger groups should use
# ebk_bound instead.
DEFAULT_GROUP_ORDER_BUDGET = 3**6
DEFAULT_STATE_BUDGET = 10**7

# Exhaustive subset search is used while the number of candidate subsets
# stays under this ceiling.
DEFAULT_SUBSET_BUDGET = 10**7


@dataclass(frozen=True)
class GroupSpec:
    """The group (Z/rZ)^d."""

    r: int
    d: int

    def __post_init__(self):
        if self.r < 2 or self.d < 1:
            raise ValueError("need r >= 2 and d >= 1")

    @property
    def order(self) -> int:
        return self.r**self.d

    @property
    def max_element_order(self) -> int:
        return self.r


@dataclass(frozen=True)
class ExponentVector:
    """Element of (Z/rZ)^d: a tuple of residues mod r."""

    entries: Tuple[int, ...]
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        if any(not 0 <= e < self.modulus for e in self.entries):
            raise ValueError("entries must lie in [0, modulus)")

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        if self.modulus != other.modulus or len(self.entries) != len(other.entries):
            raise ValueError("incompatible vectors")
        r = self.modulus
        return ExponentVector(
            tuple((a + b) % r for a, b in zip(self.entries, other.entries)), r
        )

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    @classmethod
    def zero(cls, d: int, r: int) -> "ExponentVector":
        return cls((0,) * d, r)


@dataclass(frozen=True)
class ZeroSumWitness:
    """Index set into a vector sequence whose selected vectors sum to zero."""

    indices: Tuple[int, ...]

    def __post_init__(self):
        if not self.indices:
            raise ValueError("witness must be nonempty")
        if tuple(sorted(set(self.indices))) != self.indices:
            raise ValueError("indices must be sorted and distinct")

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass
class ZeroSumSearchResult:
    witnesses: List[ZeroSumWitness]
    truncated: bool = False
    strategy: str = "exhaustive"


def ebk_bound(G: GroupSpec) -> float:
    """van Emde Boas-Kruyswijk upper bound m(1 + ln(|G|/m)), m = max order.

    For (Z/rZ)^d this is r(1 + (d-1) ln r); natural logarithm throughout.
    """
    return G.r * (1.0 + (G.d - 1) * math.log(G.r))


def davenport_n_exact(
    G: GroupSpec,
    order_budget: int = DEFAULT_GROUP_ORDER_BUDGET,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> int:
    """Exact maximal length of a zero-sum-free sequence over G.

    Breadth-first search over states, where a state is the set of all
    achievable nonempty-subset sums of the sequence so far; a sequence is
    extendable by g iff 0 stays unreachable.  Deduplication by the state
    set itself keeps levels small for the tiny groups this is meant for.
    """
    if G.order > order_budget:
        raise BudgetExceeded(
            f"|G| = {G.order} exceeds exhaustion budget {order_budget}; use ebk_bound"
        )
    order, r, d = G.order, G.r, G.d

    # Encode elements as base-r integers; precompute the addition table.
    def add(u: int, v: int) -> int:
        out = 0
        mult = 1
        for _ in range(d):
            out += ((u + v) % r) * mult
            u //= r
            v //= r
            mult *= r
        return out

    add_table = [[add(u, v) for v in range(order)] for u in range(order)]
    elements = range(1, order)  # 0 itself is never zero-sum-free

    states = {frozenset()}
    depth = 0
    seen_total = 1
    while True:
        nxt = set()
        for S in states:
            for g in elements:
                row = add_table[g]
                sums = set(S)
                sums.add(g)
                for s in S:
                    sums.add(row[s])
                if 0 not in sums:
                    nxt.add(frozenset(sums))
        if not nxt:
            return depth
        seen_total += len(nxt)
        if seen_total > state_budget:
            raise BudgetExceeded(f"state budget {state_budget} exceeded at depth {depth + 1}")
        states = nxt
        depth += 1


def prop24_lower_bound(r_len: int, k: int, n: int) -> Fraction:
    """Lower bound binom(r_len, k) / binom(r_len, n) on the number of
    zero-sum subsequences of length in [k - n, k] inside any sequence of
    r_len group elements, valid when r_len > k > n = n(G)."""
    if not (r_len > k > n >= 0):
        raise DomainError(f"need r_len > k > n >= 0, got {(r_len, k, n)}")
    return Fraction(comb(r_len, k), comb(r_len, n))


def _vector_tuples(vectors: Sequence[ExponentVector]) -> Tuple[List[Tuple[int, ...]], int]:
    if not vectors:
        raise ValueError("vectors must be nonempty")
    r = vectors[0].modulus
    d = len(vectors[0].entries)
    vs = []
    for v in vectors:
        if v.modulus != r or len(v.entries) != d:
            raise ValueError("vectors must share modulus and dimension")
        vs.append(v.entries)
    return vs, r


def _subset_count(n: int, k: int) -> int:
    return sum(comb(n, i) for i in range(1, min(k, n) + 1))


def find_zero_sum_subsets(
    vectors: Sequence[ExponentVector],
    k: int,
    limit: Optional[int] = None,
    seed: int = 0,
    subset_budget: int = DEFAULT_SUBSET_BUDGET,
    restart_budget: int = 20000,
) -> ZeroSumSearchResult:
    """Distinct index sets of size <= k whose vectors sum to zero.

    Strategy ladder: exhaustive enumeration while the subset count is small
    enough; otherwise dynamic programming over reachable group states with
    witness backtracking, topped up by seeded randomized restarts with
    deduplication.  Deterministic for a fixed seed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    vs, r = _vector_tuples(vectors)
    n = len(vs)
    d = len(vs[0])
    zero = (0,) * d
    cap = limit if limit is not None else float("inf")

    def vsum(acc: Tuple[int, ...], w: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple((a + b) % r for a, b in zip(acc, w))

    if _subset_count(n, k) <= subset_budget:
        found: List[ZeroSumWitness] = []
        truncated = False
        for size in range(1, min(k, n) + 1):
            for combo in itertools.combinations(range(n), size):
                acc = zero
                for i in combo:
                    acc = vsum(acc, vs[i])
                if acc == zero:
                    found.append(ZeroSumWitness(combo))
                    if len(found) >= cap:
                        return ZeroSumSearchResult(found, truncated, "exhaustive")
        return ZeroSumSearchResult(found, truncated, "exhaustive")

    # DP over (sum-state, subset-size) reachability with one witness per state.
    witnesses: Dict[Tuple[int, ...], ZeroSumWitness] = {}

    def dp_pass(order: Sequence[int]) -> None:
        # states: sum -> smallest (size, index tuple) reaching it
        states: Dict[Tuple[int, ...], Tuple[int, Tuple[int, ...]]] = {}
        for i in order:
            w = vs[i]
            updates = {}
            if w not in states:
                updates[w] = (1, (i,))
            for ssum, (size, idxs) in states.items():
                if size >= k:
                    continue
                t = vsum(ssum, w)
                if t not in states and t not in updates:
                    updates[t] = (size + 1, idxs + (i,))
            states.update(updates)
            if zero in states:
                _, idxs = states.pop(zero)
                key = tuple(sorted(idxs))
                witnesses.setdefault(key, ZeroSumWitness(key))
                if len(witnesses) >= cap:
                    return

    dp_pass(range(n))
    rng = random.Random(seed)
    restarts = 0
    truncated = False
    while len(witnesses) < cap and restarts < restart_budget:
        order = list(range(n))
        rng.shuffle(order)
        before = len(witnesses)
        dp_pass(order)
        restarts += 1
        if len(witnesses) == before and restarts > 200 and limit is None:
            break
    if limit is not None and len(witnesses) < cap:
        truncated = True
    out = [witnesses[key] for key in sorted(witnesses)]
    return ZeroSumSearchResult(out, truncated, "dp+random-restart")
