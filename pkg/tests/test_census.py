import math

import pytest

from powshift.arith import build_prime_table
from powshift.census import (
    _enumerate_exact,
    census_grid,
    density_exponents,
    enumerate_B,
    enumerate_Bstar,
)
from powshift.errors import BudgetExceeded
from powshift.harvest import ShiftSet


class TestEnumerateB:
    def test_small_phi_set(self):
        # n <= 10 with totient-product a square: 1, 2, 5 (products 1, 1, 4)
        # and 10 ((2-1)(5-1) = 4).
        assert enumerate_B(10, ShiftSet.of(-1), 2) == [1, 2, 5, 10]

    def test_small_sigma_set(self):
        assert 3 in enumerate_B(3, ShiftSet.of(1), 2)  # 3 + 1 = 4 = 2^2
        assert 1 in enumerate_B(3, ShiftSet.of(1), 2)

    def test_x_one(self):
        assert enumerate_B(1, ShiftSet.of(-1), 5) == [1]
        assert enumerate_B(1, ShiftSet.of(-1, 1), 2) == [1]

    def test_exclude_trivial(self):
        # 1 and 2 have trivial (all-ones) products; 5 and 10 have root 2.
        members = enumerate_B(10, ShiftSet.of(-1), 2, include_trivial=False)
        assert members == [5, 10]

    def test_matches_exact_oracle(self, small_table):
        for x, shifts, r in [(300, (-1,), 2), (300, (1,), 2), (200, (-1, 1), 2),
                             (500, (-1,), 3), (150, (2,), 2), (100, (-3,), 2)]:
            fast = enumerate_B(x, ShiftSet(shifts), r)
            slow = _enumerate_exact(x, shifts, r, None, small_table)
            assert fast == slow

    def test_ceiling(self):
        with pytest.raises(BudgetExceeded):
            enumerate_B(10**8, ShiftSet.of(-1), 2, ceiling=10**7)

    def test_counts_nondecreasing(self):
        _, report = census_grid([100, 1000, 10**4], ShiftSet.of(-1), 2)
        assert list(report.counts) == sorted(report.counts)

    def test_shard_geometry_irrelevant(self):
        A = ShiftSet.of(-1)
        assert enumerate_B(10**4, A, 2, jobs=1) == enumerate_B(10**4, A, 2, jobs=5)


class TestEnumerateBstar:
    def test_minimum_phi_member(self):
        members = enumerate_Bstar(10, -1, 2)
        assert members == [10]  # phi(10) = 4 = 2^2

    def test_sigma_member_22(self):
        members = enumerate_Bstar(22, +1, 2)
        assert 22 in members
        # Oracle: no squarefree semiprime below 22 has a square sigma.
        table = build_prime_table(100)
        assert members == _enumerate_exact(22, (1,), 2, 2, table)

    def test_empty_below_first_semiprime(self):
        assert enumerate_Bstar(5, -1, 2) == []

    def test_omega_filter(self, small_table):
        from powshift.arith import factorize

        for n in enumerate_Bstar(10**4, -1, 2):
            f = factorize(n, small_table)
            assert len(f.factors) == 2 and f.is_squarefree()

    def test_matches_exact_oracle(self, small_table):
        for x, sign, r in [(500, -1, 2), (500, +1, 2), (1000, -1, 3)]:
            assert enumerate_Bstar(x, sign, r) == _enumerate_exact(x, (sign,), r, r, small_table)

    def test_bstar_within_omega_restricted_B(self):
        # Cross-module: B* members are exactly the omega = r members of the
        # matching single-shift B set.
        x = 2000
        b_members = enumerate_B(x, ShiftSet.of(-1), 2)
        bstar = set(enumerate_Bstar(x, -1, 2))
        table = build_prime_table(x)
        from powshift.arith import factorize

        omega2 = {
            n for n in b_members if n > 1 and len(factorize(n, table).factors) == 2
        }
        assert bstar == omega2


class TestDensityExponents:
    def test_trivial_points(self):
        report = density_exponents([10, 100], [1, 100])
        assert report.exponents[0] == pytest.approx(0.0)
        assert report.exponents[1] == pytest.approx(1.0)

    def test_zero_count_flagged(self):
        report = density_exponents([10, 100], [0, 5])
        assert report.exponents[0] is None
        assert report.exponents[1] == pytest.approx(math.log(5) / math.log(100))

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            density_exponents([100, 10], [1, 2])

    def test_exponent_series_emitted(self):
        _, report = census_grid([10**3, 10**4, 10**5], ShiftSet.of(-1), 2)
        assert all(e is not None for e in report.exponents)
        assert report.params["shifts"] == (-1,)
