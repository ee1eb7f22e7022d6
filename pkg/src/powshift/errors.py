"""Exception taxonomy shared by all powshift modules."""


class PowshiftError(Exception):
    """Base class for all library errors."""


class BudgetExceeded(PowshiftError):
    """A configured search/memory budget would be (or was) exceeded."""


class IncompleteFactorization(PowshiftError):
    """A cofactor beyond the prime table's reach remained unfactored."""

    def __init__(self, value: int, cofactor: int):
        super().__init__(f"cannot complete factorization of {value}: cofactor {cofactor}")
        self.value = value
        self.cofactor = cofactor


class NonpositiveShiftValue(PowshiftError):
    """A shifted prime p + a came out <= 0."""


class SmoothnessViolated(PowshiftError):
    """A factorization contains a prime above the smoothness bound."""


class InfeasibleParameters(PowshiftError):
    """No valid subset-size cap k >= 1 exists for the requested bounds."""


class EmptyHarvest(PowshiftError):
    """The smoothness filter left no primes; parameters need overrides."""


class RangeOverflow(PowshiftError):
    """A scan value left the 64-bit primality range."""


class DomainError(PowshiftError):
    """Arguments violate a documented domain constraint."""
