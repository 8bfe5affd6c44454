//! Deterministic arithmetic: sieving, factorization, divisor functions,
//! prime sums and smooth numbers.

pub mod divisor;
pub mod prime_sums;
pub mod primes;
pub mod sieve;
pub mod smooth;

pub use divisor::{tau_k, tau_k_from_exponents, trial_factor};
pub use prime_sums::{
    analytic_prime_power_sum, analytic_prime_power_sum_llog, analytic_prime_sum_deficit_llog,
    prime_power_sum, prime_power_sum_auto, PrimeSum, SumPath, DEFAULT_ENUMERATION_CUTOFF,
};
pub use primes::{for_each_prime_between, is_prime, isqrt, next_prime, primes_between, primes_up_to, PrimeRange};
pub use sieve::{
    build_factor_table, build_segments_par, factor_profile, FactorProfile, FactorSegments, FactorTable, Factors,
    SieveConfig, DEFAULT_SEGMENT_LEN, SIEVE_CEILING,
};
pub use smooth::{enumerate_smooth, enumerate_smooth_with_budget, rankin_tail_bound};
