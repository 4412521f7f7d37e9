//! Plane curves `w2^(n+2) = f~(w0, w1)(w1^2 - w0^2)` with `f` of odd degree.

use num_traits::Zero;

use super::forms::{homogenize, BinaryForm};
use crate::arith::factor::poly_factor_rational;
use crate::arith::poly::{poly_discriminant, poly_resultant, Poly};
use crate::error::{Error, Result};
use crate::rational::rat;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateCurve {
    pub f: Poly,
    pub n: usize,
    /// `f~(w0, w1)(w1^2 - w0^2)`, of degree `n + 2`.
    pub rhs: BinaryForm,
    pub genus: usize,
    /// `(1:1:0)` lies on the curve.
    pub rational_point_ok: bool,
    /// `(θ:1:0)` lies on the curve for a root `θ` of `f`.
    pub root_point_ok: bool,
}

impl CandidateCurve {
    pub fn equation(&self) -> String {
        format!("w2^{} = {}", self.n + 2, self.rhs.to_string().replace("x0", "w0").replace("x1", "w1"))
    }
}

pub fn build_candidate_curve(f: &Poly) -> Result<CandidateCurve> {
    let n = f.degree().unwrap_or(0);
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Degree { got: f.degree_i64(), range: "odd and at least 3" });
    }
    if f.leading() != rat(1) {
        return Err(Error::Precondition("f must be monic".into()));
    }
    if poly_discriminant(f)?.is_zero() {
        return Err(Error::NotSeparable);
    }
    let q = Poly::from_ints(&[-1, 0, 1]);
    let res = poly_resultant(f, &q)?;
    if res.is_zero() {
        return Err(Error::NotCoprime(res));
    }
    if !poly_factor_rational(f)?.is_irreducible() {
        return Err(Error::Precondition(format!("f = {f} is reducible over Q")));
    }
    let rhs = homogenize(f, n)?.mul(&BinaryForm::new(2, vec![rat(1), rat(0), rat(-1)])?);
    let rational_point_ok = rhs.eval(&rat(1), &rat(1)).is_zero();
    // in Q[θ] = Q[x]/(f) the right side at (θ, 1) is f(θ)(1 - θ^2) ≡ 0
    let root_point_ok = rhs.dehomogenize().rem(f).is_zero();
    Ok(CandidateCurve {
        f: f.clone(),
        n,
        rhs,
        genus: n * (n + 1) / 2,
        rational_point_ok,
        root_point_ok,
    })
}
