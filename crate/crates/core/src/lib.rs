//! Mod-Poisson convergence of ω(U_n) through penalised Bernoulli models.
//!
//! The crate computes exact laws of the independent model `Ω_n`, its tilted and
//! penalised variants, the limiting functions `Φ_C`, `Φ_Ω`, `Φ_ω`, and the
//! arithmetic quantities they approximate. [`model::Sampler`] draws the
//! penalised model pathwise.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arithmetic;
pub mod dist;
pub mod error;
pub mod limiting;
pub mod model;
pub mod numeric;
pub mod primes;
pub mod special;
pub mod verify;

pub use dist::{total_variation, DiscreteDist};
pub use error::{Error, Result};
pub use primes::{params, sieve, ModelParams, PrimeTable, TiltConvention};
