pub mod acceptance;
pub mod error;
pub mod exp_sums;
pub mod geodesic_count;
pub mod local_factors;
pub mod number_base;
pub mod orbital_counts;
pub mod zagier_l;

pub use error::{Error, Result};
