//! Binary forms and the section `s' = u0^2 P∞(x0, x1) + u1^2 P0(x0, x1)`.

use std::fmt;

use num_traits::Zero;

use crate::arith::poly::{poly_discriminant, poly_resultant, Poly};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `Σ c_i x0^i x1^(deg - i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryForm {
    degree: usize,
    coeffs: Vec<Rational>,
}

impl BinaryForm {
    pub fn new(degree: usize, mut coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() > degree + 1 {
            return Err(Error::Degree { got: coeffs.len() as i64 - 1, range: "at most the form degree" });
        }
        coeffs.resize(degree + 1, Rational::zero());
        Ok(Self { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn eval(&self, x0: &Rational, x1: &Rational) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * x0.pow(i as i32) * x1.pow((self.degree - i) as i32))
            .sum()
    }

    /// `F(x, 1)`.
    pub fn dehomogenize(&self) -> Poly {
        Poly::new(self.coeffs.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![Rational::zero(); self.degree + o.degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self { degree: self.degree + o.degree, coeffs: c }
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono: Vec<String> = [(i, "x0"), (self.degree - i, "x1")]
                .iter()
                .filter(|(e, _)| *e > 0)
                .map(|(e, v)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
                .collect();
            let body = mono.join("*");
            let one = Rational::from_integer(1.into());
            terms.push(if body.is_empty() {
                c.to_string()
            } else if *c == one {
                body
            } else if *c == -one {
                format!("-{body}")
            } else {
                format!("{c}*{body}")
            });
        }
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + ").replace("+ -", "- "))
        }
    }
}

/// `x1^degree · P(x0/x1)`.
pub fn homogenize(p: &Poly, degree: usize) -> Result<BinaryForm> {
    if p.degree().is_some_and(|d| d > degree) {
        return Err(Error::Degree { got: p.degree_i64(), range: "at most the form degree" });
    }
    BinaryForm::new(degree, p.coeffs().to_vec())
}

/// `s' = u0^2 P∞~(x0, x1) + u1^2 P0~(x0, x1)` of bidegree (2, 4).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiSection {
    pub p_inf: BinaryForm,
    pub p_zero: BinaryForm,
}

impl BiSection {
    pub fn eval(&self, u0: &Rational, u1: &Rational, x0: &Rational, x1: &Rational) -> Rational {
        u0 * u0 * self.p_inf.eval(x0, x1) + u1 * u1 * self.p_zero.eval(x0, x1)
    }

    /// The quartic `u^2 P∞(x) + P0(x)` over the affine point `(u : 1)`.
    pub fn fiber(&self, u: &Rational) -> Poly {
        &self.p_inf.dehomogenize().scale(&(u * u)) + &self.p_zero.dehomogenize()
    }
}

fn require_quartic(p: &Poly, name: &str) -> Result<()> {
    if p.degree() != Some(4) {
        return Err(Error::Precondition(format!("{name} must be a quartic, got degree {}", p.degree_i64())));
    }
    Ok(())
}

pub fn build_section(p_inf: &Poly, p_zero: &Poly) -> Result<BiSection> {
    require_quartic(p_inf, "P_inf")?;
    require_quartic(p_zero, "P_0")?;
    for p in [p_inf, p_zero] {
        if poly_discriminant(p)?.is_zero() {
            return Err(Error::NotSeparable);
        }
    }
    let res = poly_resultant(p_inf, p_zero)?;
    if res.is_zero() {
        return Err(Error::NotCoprime(res));
    }
    Ok(BiSection { p_inf: homogenize(p_inf, 4)?, p_zero: homogenize(p_zero, 4)? })
}

/// Both quartics separable and coprime, which makes `s' = 0` smooth.
pub fn smoothness_check(p_inf: &Poly, p_zero: &Poly) -> Result<bool> {
    require_quartic(p_inf, "P_inf")?;
    require_quartic(p_zero, "P_0")?;
    Ok(!poly_resultant(p_inf, p_zero)?.is_zero()
        && !poly_discriminant(p_inf)?.is_zero()
        && !poly_discriminant(p_zero)?.is_zero())
}
