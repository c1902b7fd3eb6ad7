//! Separable-kernel integral operators on `L_p` spaces and covariance-type
//! commutation relations between them.
//!
//! The crate is organised bottom-up:
//!
//! * [`measure`]: supports, symbolic function expressions, pairings and norms.
//! * [`sepop`]: operators `scalar·I + Σ a_i(t) c_i(s)` and their algebra.
//! * [`commrel`]: verification of `H(A) B = B F(A)` relations.
//! * [`normest`]: rigorous and empirical operator-norm estimates.
//! * [`families`]: constructors for concrete commuting-type operator pairs.
//! * [`convlab`]: convergence experiments for parametrised sequences.
//! * [`cli`]: config-driven command line front end.

pub mod cli;
pub mod commrel;
pub mod convlab;
pub mod error;
pub mod families;
pub mod measure;
pub mod normest;
pub mod random;
pub mod sepop;

pub use error::{Error, Result};
pub use measure::{Exponent, FunctionExpr, Interval, PairingValue, SupportSet};

pub use sepop::{KernelTerm, PolynomialSpec, SeparableOperator};
