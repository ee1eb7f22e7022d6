import pytest

from powshift.arith import build_prime_table


@pytest.fixture(scope="session")
def table():
    return build_prime_table(10**5)


@pytest.fixture(scope="session")
def small_table():
    return build_prime_table(1000)
