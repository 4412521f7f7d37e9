//! Exact arithmetic for Hilbert symbols over `Q` and `Q(√d)`, Brauer
//! invariants of Châtelet surfaces, and certificates for the failure of weak
//! approximation after a quadratic base change.

pub mod arith;
pub mod bundle;
pub mod cert;
pub mod chatelet;
pub mod cli;
pub mod config;
pub mod error;
pub mod hilbert;
pub mod local;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
