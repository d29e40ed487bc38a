//! Exact computation with twisted modules for vertex operator superalgebras.

pub mod error;
pub mod formal_calculus;
pub mod harness;
pub mod automorphism;
pub mod model_zoo;
pub mod twist_operator;
pub mod twisted_module;
pub mod verdict;
pub mod vosa_core;

pub use error::{CalcError, Result};
pub use formal_calculus::{Exponent, LogLaurentSeries, Monomial, Scalar, Series, Var, Window, Q};
