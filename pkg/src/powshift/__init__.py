"""powshift: squarefree integers whose shifted-prime products are perfect powers."""

__version__ = "0.1.0"

from .arith import (
    Factorization,
    PrimeTable,
    build_prime_table,
    factorize,
    integer_nth_root,
    is_perfect_power,
    is_prime,
    is_smooth,
    shifted_product,
)
from .census import CensusReport, census_grid, density_exponents, enumerate_B, enumerate_Bstar
from .construct import (
    CandidateRecord,
    ConstructionParams,
    SearchBudget,
    choose_parameters,
    construct,
    verify_membership,
)
from .families import (
    FamilyRecord,
    SStatistic,
    assemble_products,
    family_scan,
    mertens_constant,
    s_statistic,
    scan_width,
    totient_ratio_sum,
)
from .groups import (
    ExponentVector,
    GroupSpec,
    ZeroSumWitness,
    davenport_n_exact,
    ebk_bound,
    find_zero_sum_subsets,
    prop24_lower_bound,
)
from .harvest import HarvestedPrime, ShiftSet, exponent_vector, harvest, pi_F
