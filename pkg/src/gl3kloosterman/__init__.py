"""Exact GL(3) long-element Kloosterman sums, their Fourier transforms and bilinear forms."""

from .arith import (
    Factorization,
    ResidueClass,
    classical_kloosterman,
    crt_combine,
    euler_phi,
    factorize,
    mod_inverse,
    nu_p,
    ramanujan_sum,
    same_prime_support_count,
)
from .bilinear import (
    BoundReport,
    CoeffSeq,
    a_function,
    bilinear_s,
    gcd_stratification,
    m_beta,
    theorem2_experiment,
    theorem3_experiment,
)
from .cyclotomic import CycInt, root_of_unity
from .errors import (
    CapExceeded,
    CoprimalityViolated,
    InvalidArguments,
    InvalidDecomposition,
    InvalidDivisors,
    InvalidHRange,
    KloostermanError,
    ModuliNotCoprime,
    NotInvertible,
    NotPrimePower,
    OrderOverflow,
)
from .gl3_sums import (
    Gl3KloostermanArgs,
    ModuliDecomposition,
    complete_sum_identity_check,
    decompose_moduli,
    factor_coprime,
    s_long_fast,
    s_long_naive,
    s_prime_primepower,
    symmetry_identities,
    twisted_factor,
    well_definedness_check,
)
from .transforms import (
    RValue,
    ShatArgs,
    r_function,
    r_prime_function,
    rbound_check,
    reverse_moduli_check,
    shat_closed_form,
    shat_factorization_check,
    shat_naive,
    v_decomposition,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
