//! Base-ring arithmetic for Z and Z[i]: norms, factorization, quadratic symbols,
//! fundamental discriminants and quadratic L-values.

mod elem;
mod factor;
mod lvalue;
mod quadratic;
mod residue;

pub use elem::{Ring, RingElem};
pub use factor::{
    divisor_count, divisors, euler_phi, factor_u64, factorize, factorize_with, gaussian_prime_above, ideals_up_to,
    is_prime, is_prime_u64, mobius, pow_mod, Factorization, Sieve,
};
pub use lvalue::{
    class_number_and_unit, dirichlet_l, form_cycles, fundamental_unit, l_at_one_rat, reduced_forms, LMethod,
    CLASS_NUMBER_CONSTANT,
};
pub use quadratic::{
    fundamental_discriminant, is_fundamental, is_global_square, is_square_mod, kronecker, kronecker_from_factorization,
    kronecker_int, local_symbol, DiscriminantData,
};
pub use residue::Residues;

/// |x|² over Z[i], |x| over Z.
pub fn norm(x: &RingElem) -> u64 {
    x.norm()
}
