import math

import pytest

from powshift.arith import is_prime
from powshift.construct import verify_membership
from powshift.errors import RangeOverflow
from powshift.families import (
    assemble_products,
    family_scan,
    load_checkpoint,
    mertens_constant,
    s_statistic,
    scan_width,
    totient_ratio_sum,
    write_checkpoint,
)
from powshift.harvest import ShiftSet


def oracle_theta_sum(N, r, sign):
    """Brute-force S(N) prime sum by direct primality checks."""
    H = scan_width(N, r)
    total = 0.0
    for n in range(1, N + 1):
        for a in range(1, H + 1):
            m = a**r * n + sign
            if m >= 2 and is_prime(m):
                total += math.log(m)
    return total


class TestScanWidth:
    def test_ceiling(self):
        assert scan_width(3, 2) == 3  # ceil(2 ln 3) = ceil(2.197)
        assert scan_width(10**4, 2) == 19


class TestFamilyScan:
    def test_plus_family_n4(self):
        recs = {r.n: r for r in family_scan(100, 2, +1)}
        # a = 1 -> 5 prime, a = 2 -> 17 prime
        assert {1, 2} <= set(recs[4].hits)

    def test_minus_family_n4(self):
        recs = {r.n: r for r in family_scan(100, 2, -1)}
        # a = 1 -> 3 prime; a = 2 -> 15 = 3 * 5 composite
        assert 1 in recs[4].hits and 2 not in recs[4].hits

    def test_hits_reverify_prime(self):
        for rec in family_scan(300, 2, +1)[:50]:
            for a in rec.hits:
                assert a <= rec.H
                assert is_prime(a**2 * rec.n + 1)

    def test_no_record_without_hits(self):
        recs = {r.n for r in family_scan(50, 2, +1)}
        H = scan_width(50, 2)
        for n in range(1, 51):
            has_hit = any(
                a**2 * n + 1 >= 2 and is_prime(a**2 * n + 1) for a in range(1, H + 1)
            )
            assert (n in recs) == has_hit

    def test_range_overflow(self):
        with pytest.raises(RangeOverflow):
            family_scan(10**6, 7, +1)

    def test_shard_independence(self):
        assert family_scan(500, 2, -1, jobs=1) == family_scan(500, 2, -1, jobs=3)


class TestAssembleProducts:
    def test_phi_member_85(self):
        recs = family_scan(100, 2, +1)
        asm = assemble_products(recs, 2, +1)
        rec = next(r for r in asm.records if r.n == 85)
        assert rec.prime_factors == (5, 17)
        assert rec.roots == ((-1, 8),)  # phi(85) = 64 = (1 * 2 * 4)^2

    def test_sigma_member_22(self):
        recs = family_scan(100, 2, -1)
        asm = assemble_products(recs, 2, -1)
        rec = next(r for r in asm.records if r.n == 22)
        assert rec.prime_factors == (2, 11)
        assert rec.roots == ((1, 6),)  # sigma(22) = 36 = (1 * 2 * 3)^2

    def test_dedupe_collapses_shared_prime_sets(self):
        # 1^2 * 4 + 1 and 2^2 * 1 + 1 both hit the prime 5; pairs built on it
        # from n = 4 and n = 1 can coincide as prime sets.
        recs = family_scan(200, 2, +1)
        asm = assemble_products(recs, 2, +1)
        keys = [r.prime_factors for r in asm.records]
        assert len(keys) == len(set(keys))
        assert asm.max_multiplicity >= 2

    def test_multiplicity_bounded_by_H(self):
        recs = family_scan(2000, 2, +1)
        asm = assemble_products(recs, 2, +1)
        assert asm.max_multiplicity <= scan_width(2000, 2)

    def test_members_verify_independently(self, table):
        for sign, shifts in ((+1, (-1,)), (-1, (1,))):
            recs = family_scan(200, 2, sign)
            asm = assemble_products(recs, 2, sign)
            for rec in asm.records[:200]:
                ok, roots = verify_membership(rec.n, ShiftSet(shifts), 2, table)
                assert ok
                assert roots == dict(rec.roots)
                assert len(rec.prime_factors) == 2

    def test_cubes(self):
        recs = family_scan(200, 3, +1)
        asm = assemble_products(recs, 3, +1)
        for rec in asm.records:
            assert len(rec.prime_factors) == 3
            phi = math.prod(p - 1 for p in rec.prime_factors)
            root = dict(rec.roots)[-1]
            assert root**3 == phi


class TestSStatistic:
    def test_small_oracle(self):
        for sign in (+1, -1):
            st = s_statistic(3, 2, sign)
            assert st.prime_sum == pytest.approx(oracle_theta_sum(3, 2, sign), rel=1e-12)
            assert st.penalty == pytest.approx(3 * math.log(3**2 * 3 + 1))

    def test_orders_agree(self):
        for N in (100, 1000):
            st = s_statistic(N, 2, +1)
            assert st.prime_sum_swapped == pytest.approx(st.prime_sum, rel=1e-9)

    def test_value_decomposition(self):
        st = s_statistic(500, 2, -1)
        assert st.value == pytest.approx(st.prime_sum - st.penalty)

    def test_predicted_coefficient(self):
        st = s_statistic(100, 2, +1)
        assert st.predicted_coefficient == pytest.approx(2 * st.c_truncated - 1)


class TestConstants:
    def test_truncations(self):
        assert mertens_constant(2) == pytest.approx(1.5)
        assert mertens_constant(3) == pytest.approx(1.75)

    def test_monotone_in_cutoff(self):
        vals = [mertens_constant(c) for c in (10, 100, 1000, 10**4)]
        assert vals == sorted(vals)

    def test_totient_sum_small(self):
        assert totient_ratio_sum(1) == pytest.approx(1.0)
        assert totient_ratio_sum(4) == pytest.approx(6.5)  # 1 + 2 + 3/2 + 2

    def test_totient_sum_tracks_constant(self):
        c = mertens_constant(10**6)
        total = totient_ratio_sum(10**4)
        assert total / 10**4 == pytest.approx(c, rel=0.02)

    def test_ratio_nondecreasing(self):
        ratios = [totient_ratio_sum(H) / H for H in (100, 1000, 10**4)]
        assert all(b >= a - 0.01 for a, b in zip(ratios, ratios[1:]))


class TestCheckpoint:
    def test_roundtrip(self, tmp_path):
        recs = family_scan(120, 2, +1)
        path = tmp_path / "ckpt.txt"
        write_checkpoint(str(path), recs, 120, 2, +1, 120)
        meta, loaded = load_checkpoint(str(path))
        assert meta["N"] == 120 and meta["completed_through"] == 120
        assert loaded == recs
