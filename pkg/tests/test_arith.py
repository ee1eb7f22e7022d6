import math

import pytest
from hypothesis import given, settings, strategies as st

from powshift.arith import (
    build_prime_table,
    euler_phi_sieve,
    factorize,
    integer_nth_root,
    is_perfect_power,
    is_prime,
    is_smooth,
    prime_mask,
    shifted_product,
)
from powshift.errors import BudgetExceeded, IncompleteFactorization, NonpositiveShiftValue


def trial_is_prime(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def trial_factorize(n):
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


class TestIsPrime:
    def test_small_values(self):
        assert is_prime(2)
        assert not is_prime(1)
        assert not is_prime(0)

    def test_strong_pseudoprime_rejected(self):
        # 3825123056546413051 = 149491 * 747451 * 34233211 (checked below),
        # a classical stress value for weak Miller-Rabin base sets.
        n = 3825123056546413051
        assert 149491 * 747451 * 34233211 == n
        assert all(trial_is_prime(f) for f in (149491, 747451, 34233211))
        assert not is_prime(n)

    def test_agrees_with_trial_division(self):
        for n in range(2000):
            assert is_prime(n) == trial_is_prime(n)

    def test_rejects_beyond_64_bits(self):
        with pytest.raises(ValueError):
            is_prime(1 << 64)

    @given(st.integers(min_value=0, max_value=10**6))
    def test_matches_oracle(self, n):
        assert is_prime(n) == trial_is_prime(n)


class TestPrimeTable:
    def test_small_primes(self, small_table):
        assert list(small_table.primes_up_to(10)) == [2, 3, 5, 7]

    def test_pi_100(self, small_table):
        assert small_table.pi(100) == 25

    def test_pi_million(self):
        t = build_prime_table(10**6)
        assert len(t.primes) == 78498

    def test_spf_divides_and_is_least(self, small_table):
        for m in range(2, 1001):
            p = small_table.smallest_prime_factor(m)
            assert m % p == 0
            assert trial_is_prime(p)
            assert all(m % q for q in range(2, p))

    def test_primes_match_is_prime(self, small_table):
        sieved = set(map(int, small_table.primes))
        for n in range(2, 1001):
            assert (n in sieved) == is_prime(n)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            build_prime_table(10**6, memory_limit=10**5)

    def test_prime_mask_matches(self):
        mask = prime_mask(500)
        for n in range(501):
            assert bool(mask[n]) == trial_is_prime(n)


class TestFactorize:
    def test_examples(self, small_table):
        assert factorize(12, small_table).factors == ((2, 2), (3, 1))
        assert factorize(1, small_table).factors == ()
        assert factorize(576, small_table).factors == ((2, 6), (3, 2))

    def test_prime_cofactor_beyond_table(self, small_table):
        f = factorize(2 * 1009, small_table)
        assert f.factors == ((2, 1), (1009, 1))

    def test_incomplete_composite_cofactor(self):
        t = build_prime_table(10)
        big = 1009 * 1013
        with pytest.raises(IncompleteFactorization):
            factorize(2 * big * big, t)

    @given(m=st.integers(min_value=1, max_value=10**5))
    def test_roundtrip(self, table, m):
        f = factorize(m, table)
        assert f.reassemble() == m
        assert f.factors == tuple(trial_factorize(m))
        primes = [p for p, _ in f.factors]
        assert primes == sorted(primes)


class TestSmooth:
    def test_examples(self, small_table):
        assert is_smooth(8, 2, small_table)
        assert not is_smooth(14, 5, small_table)
        assert is_smooth(28, 7, small_table)
        assert is_smooth(1, 2, small_table)

    @given(
        m=st.integers(min_value=1, max_value=10**5),
        y=st.sampled_from([2, 3, 5, 7, 11, 100]),
    )
    def test_matches_max_factor(self, table, m, y):
        f = factorize(m, table)
        assert is_smooth(m, y, table) == (f.max_prime() <= y)


class TestPerfectPower:
    def test_examples(self):
        for r in range(2, 7):
            assert is_perfect_power(1, r) == (True, 1)
        assert is_perfect_power(576, 2) == (True, 24)
        assert is_perfect_power(72, 3) == (False, None)

    @given(
        st.integers(min_value=1, max_value=10**5),
        st.integers(min_value=2, max_value=6),
    )
    def test_matches_exhaustive(self, m, r):
        brute = any(b**r == m for b in range(1, round(m ** (1 / r)) + 2))
        ok, root = is_perfect_power(m, r)
        assert ok == brute
        if ok:
            assert root**r == m

    def test_big_value(self):
        b = 10**25 + 7
        assert is_perfect_power(b**3, 3) == (True, b)
        assert is_perfect_power(b**3 + 1, 3) == (False, None)

    @given(st.integers(min_value=0, max_value=10**12), st.integers(min_value=2, max_value=8))
    def test_integer_nth_root_floor(self, m, r):
        b = integer_nth_root(m, r)
        assert b**r <= m < (b + 1) ** r


class TestShiftedProduct:
    def test_examples(self):
        assert shifted_product([2, 5], -1) == 4
        assert shifted_product([], 1) == 1
        assert shifted_product([2, 11], 1) == 36

    def test_nonpositive(self):
        with pytest.raises(NonpositiveShiftValue):
            shifted_product([2, 5], -2)

    def test_rejects_repeats(self):
        with pytest.raises(ValueError):
            shifted_product([3, 3], 1)

    @given(st.permutations([2, 3, 5, 7, 11]), st.sampled_from([-1, 1, 2, 10]))
    def test_order_independence(self, perm, a):
        assert shifted_product(perm, a) == shifted_product(sorted(perm), a)


def test_euler_phi_sieve():
    phi = euler_phi_sieve(20)
    expected = [0, 1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4, 12, 6, 8, 8, 16, 6, 18, 8]
    assert list(phi) == expected
