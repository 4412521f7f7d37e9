//! Exact integer, rational, polynomial and residue-field arithmetic.

pub mod factor;
pub mod finite_field;
pub mod jacobi;
pub mod poly;
pub(crate) mod zp;

pub use factor::{poly_factor_rational, Factorization};
pub use finite_field::{ff_is_square, FieldDescriptor, FiniteFieldElem};
pub use jacobi::jacobi_symbol;
pub use poly::{poly_discriminant, poly_resultant, Poly};
