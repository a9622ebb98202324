//! Exact q-series for eta-quotients, Siegel functions and Weierstrass
//! functions, decomposition of modular forms for Gamma0(2^n) into
//! eta-quotients, and ring-class invariants via Shimura reciprocity.

pub(crate) mod arith;
pub mod error;
pub mod bigcomplex;
pub mod cli;
pub mod cm;
pub mod decomposition;
pub mod elliptic;
pub mod eta;
pub mod mat2;
pub mod reciprocity;
pub mod series;

pub use bigcomplex::BigComplex;
pub use error::{Error, Result};
pub use series::{exponent, CyclotomicNumber, Exponent, QSeries};
