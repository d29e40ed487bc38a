//! Exact formal calculus: scalars, rationals and multivariable series with
//! rational exponents and logarithms.

pub mod expand;
pub mod rational;
pub mod scalar;
pub mod series;

pub use rational::Q;
pub use expand::nilpotent_power;
pub use scalar::Scalar;
pub use series::{
    exp, int_exp, mul, mul_with, BranchShift, Coeff, Exponent, LogLaurentSeries, Mismatch, Monomial, Series, SeriesTable,
    Support, Var, VarSupport, Window,
};
