//! Exact truncated q-series arithmetic.

pub mod cyclotomic;
pub(crate) mod product;
pub mod qseries;
pub(crate) mod serde_impl;

pub use cyclotomic::{euler_phi, CyclotomicNumber};
pub use qseries::{exponent, Exponent, QSeries};
