use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what}: argument must be nonzero")]
    ZeroArgument { what: &'static str },
    #[error("jacobi symbol needs an odd positive modulus, got {0}")]
    BadJacobiModulus(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a squarefree integer outside {{0, 1}}")]
    BadQuadField(i64),
    #[error("polynomial degree {got} is outside the supported range {range}")]
    Degree { got: i64, range: &'static str },
    #[error("polynomials share a common factor (resultant {0})")]
    NotCoprime(Rational),
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("even residue characteristic is not handled by the tame symbol at {0}")]
    EvenResidueChar(String),
    #[error("element is not a unit at {0}")]
    NotUnit(String),
    #[error("place {place} is not valid here: {reason}")]
    BadPlace { place: String, reason: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("scan bound {0} exceeded")]
    BoundExceeded(u64),
    #[error("cannot factor {0}")]
    Factorization(String),
    #[error("x = {0} is not a local point")]
    NotLocalPoint(Rational),
    #[error("every representation of the Brauer class vanishes at x = {0}")]
    AllRepresentationsVanish(Rational),
    #[error("no local point found at {0}")]
    NoLocalPoints(String),
    #[error("hensel lift did not converge: {0}")]
    LiftFailed(String),
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
