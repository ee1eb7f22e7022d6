"""Subset constructor for squarefree n with r-th power shifted products.

Pipeline: choose (y, u, k), harvest primes with simultaneously smooth
shifts, search for zero-sum exponent-vector subsets, assemble each subset
into a verified candidate n = prod(p) <= x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import PrimeTable, factorize, is_perfect_power, is_prime, shifted_product
from .errors import (
    EmptyHarvest,
    IncompleteFactorization,
    InfeasibleParameters,
    NonpositiveShiftValue,
)
from .groups import ExponentVector
from .harvest import HarvestedPrime, ShiftSet, harvest

# Asymptotically admissible smoothness exponent for a single linear shift.
SINGLE_SHIFT_EXPONENT = 0.2961


@dataclass(frozen=True)
class ConstructionParams:
    """Resolved parameters of one construction run.

    Defaults follow the asymptotic recipe (y = log x / log log x,
    u from the shift-count case split, k = floor(log x / log y^u)); any
    overridden field is recorded in `overrides` so runs stay honestly
    labeled.
    """

    x: int
    y: float
    u: float
    k: int
    t: int
    r: int
    A: ShiftSet
    eps: Optional[float]
    overrides: Tuple[Tuple[str, object], ...] = ()

    @property
    def harvest_bound(self) -> int:
        # Primes are drawn up to y^u, but never beyond x itself.
        return min(self.x, int(self.y**self.u))


@dataclass(frozen=True)
class CandidateRecord:
    """A verified member n with its factors, per-shift roots and provenance."""

    n: int
    prime_factors: Tuple[int, ...]
    roots: Tuple[Tuple[int, int], ...]  # (shift, b) with b^r = prod(p + shift)
    provenance: Tuple[Tuple[str, object], ...]

    @property
    def trivial(self) -> bool:
        """n = 1 or all shifted products equal to 1."""
        return self.n == 1 or all(b == 1 for _, b in self.roots)


def default_u(s: int, eps: float) -> float:
    if s == 1:
        return 1.0 / SINGLE_SHIFT_EXPONENT
    return 1.0 / (1.0 + eps - 1.0 / (2 * s))


def choose_parameters(
    x: int,
    A: ShiftSet,
    r: int,
    eps: Optional[float] = None,
    overrides: Optional[Dict[str, object]] = None,
) -> ConstructionParams:
    """Resolve (y, u, k, t) for a bound x, recording every override.

    When y is overridden and the k recipe collapses to zero, k falls back
    to the generic product cap floor(log2 x): subset products are then
    bounded by x directly rather than by y^(u k).
    """
    overrides = dict(overrides or {})
    s = A.s
    if eps is None:
        eps = 1.0 / (6 * s)  # midpoint of the admissible interval (0, 1/(3s))
    elif not 0 < eps < 1.0 / (3 * s):
        raise InfeasibleParameters(f"eps={eps} outside (0, 1/{3 * s})")

    applied: List[Tuple[str, object]] = []
    if "y" in overrides:
        y = float(overrides["y"])
        applied.append(("y", y))
    else:
        if x < 16:
            raise InfeasibleParameters(f"x={x} too small for the y recipe")
        y = math.log(x) / math.log(math.log(x))
    if y < 2:
        raise InfeasibleParameters(f"smoothness bound y={y:.3f} < 2; override y")

    if "u" in overrides:
        u = float(overrides["u"])
        applied.append(("u", u))
    else:
        u = default_u(s, eps)
    if u <= 1:
        raise InfeasibleParameters(f"u={u} must exceed 1")

    if "k" in overrides:
        k = int(overrides["k"])
        applied.append(("k", k))
    else:
        k = int(math.log(x) / math.log(y**u))
        if k < 1 and "y" in overrides:
            # Recipe already abandoned; cap subset size by the product bound.
            k = int(math.log2(x))
            applied.append(("k", "product-bound"))
    if k < 1:
        raise InfeasibleParameters(
            f"no subset cap k >= 1 for x={x}, y={y:.3f}, u={u:.3f}"
        )
    t = sum(1 for m in range(2, int(y) + 1) if is_prime(m))
    return ConstructionParams(x, y, u, k, t, r, A, eps, tuple(applied))


def verify_membership(
    n: int,
    A: ShiftSet,
    r: int,
    table: PrimeTable,
) -> Tuple[bool, Optional[Dict[int, int]]]:
    """Whether n is squarefree with every shifted product a perfect r-th power.

    Returns (flag, {shift: root}); n = 1 passes with all roots 1.  A shifted
    value p + a <= 0 disqualifies n (the product cannot be a positive r-th
    power).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return True, {a: 1 for a in A.shifts}
    f = factorize(n, table)
    if not f.is_squarefree():
        return False, None
    primes = [p for p, _ in f.factors]
    roots: Dict[int, int] = {}
    for a in A.shifts:
        try:
            prod = shifted_product(primes, a)
        except NonpositiveShiftValue:
            return False, None
        ok, b = is_perfect_power(prod, r)
        if not ok:
            return False, None
        roots[a] = b
    return True, roots


@dataclass
class SearchBudget:
    max_witnesses: int = 10000
    max_nodes: int = 5_000_000


@dataclass
class ConstructionResult:
    records: List[CandidateRecord]
    harvest_size: int
    truncated: bool = False


def construct(
    params: ConstructionParams,
    table: PrimeTable,
    budget: Optional[SearchBudget] = None,
    seed: int = 0,
    include_trivial: bool = True,
) -> ConstructionResult:
    """Run the full pipeline and return verified candidate records.

    The subset search is a depth-first scan over harvested primes in
    increasing order, pruned by the running product bound prod(p) <= x and
    the size cap k; every zero-sum leaf is assembled and re-verified.
    Deterministic; the seed only matters if a randomized fallback is ever
    added behind the same interface.
    """
    budget = budget or SearchBudget()
    hs = harvest(params.harvest_bound, params.y, params.A, params.r, table)
    if not hs:
        raise EmptyHarvest(
            f"no primes <= {params.harvest_bound} with {params.y}-smooth shifts"
        )
    vs = [h.vector.entries for h in hs]
    primes = [h.p for h in hs]
    r = params.r
    d = len(vs[0])
    zero = (0,) * d
    n_h = len(hs)

    records: List[CandidateRecord] = []
    nodes = 0
    truncated = False
    seen_n = set()

    base_prov: List[Tuple[str, object]] = [
        ("x", params.x),
        ("y", params.y),
        ("u", params.u),
        ("k", params.k),
        ("r", r),
        ("shifts", params.A.shifts),
        ("seed", seed),
        ("overrides", params.overrides),
    ]

    def emit(indices: Tuple[int, ...], product: int) -> None:
        ps = tuple(primes[i] for i in indices)
        ok, roots = verify_membership(product, params.A, r, table)
        if not ok:  # pragma: no cover - construction identity guarantees this
            raise AssertionError(f"constructed n={product} failed verification")
        assert product not in seen_n, "distinct subsets must give distinct n"
        seen_n.add(product)
        rec = CandidateRecord(
            n=product,
            prime_factors=ps,
            roots=tuple(sorted(roots.items())),
            provenance=tuple(base_prov + [("witness_indices", indices)]),
        )
        if include_trivial or not rec.trivial:
            records.append(rec)

    if include_trivial:
        emit((), 1)

    def dfs(start: int, acc: Tuple[int, ...], product: int, chosen: Tuple[int, ...]) -> bool:
        nonlocal nodes, truncated
        for i in range(start, n_h):
            p = primes[i]
            if product * p > params.x:
                break  # primes ascend, so every later branch overflows too
            nodes += 1
            if nodes > budget.max_nodes or len(records) >= budget.max_witnesses:
                truncated = True
                return False
            nacc = tuple((a + b) % r for a, b in zip(acc, vs[i]))
            nchosen = chosen + (i,)
            if nacc == zero:
                emit(nchosen, product * p)
            if len(nchosen) < params.k:
                if not dfs(i + 1, nacc, product * p, nchosen):
                    return False
        return True

    dfs(0, zero, 1, ())
    records.sort(key=lambda rec: rec.n)
    return ConstructionResult(records, harvest_size=n_h, truncated=truncated)
