//! Branch locus of the first projection of `s' = 0` and of the degree-2 map
//! `E -> P^1`, and their disjointness.

use num_traits::{One, Zero};

use super::forms::{smoothness_check, BiSection};
use crate::arith::factor::{factor_unbounded, poly_factor_rational};
use crate::arith::poly::{poly_discriminant, poly_resultant, Poly};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct BranchLocus {
    /// Discriminant in `x` of the binary quartic `s'(u, 1; x0, x1)`.
    pub discriminant: Poly,
    /// Irreducible primitive integral factors with their multiplicities.
    pub factors: Vec<(Poly, u32)>,
    /// Whether `(1 : 0)` lies in the branch locus.
    pub contains_infinity: bool,
}

impl BranchLocus {
    pub fn radical(&self) -> Vec<Poly> {
        self.factors.iter().map(|(f, _)| f.clone()).collect()
    }
}

/// Newton interpolation through `(u_i, y_i)`.
fn interpolate(points: &[(Rational, Rational)]) -> Poly {
    let n = points.len();
    let xs: Vec<Rational> = points.iter().map(|p| p.0.clone()).collect();
    let mut dd: Vec<Rational> = points.iter().map(|p| p.1.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    let mut out = Poly::zero();
    let mut basis = Poly::one();
    for i in 0..n {
        out = &out + &basis.scale(&dd[i]);
        basis = &basis * &Poly::new(vec![-xs[i].clone(), Rational::one()]);
    }
    out
}

/// Primitive integral associate with positive leading coefficient.
pub fn normalize(f: &Poly) -> Poly {
    Poly::from_bigints(&f.primitive_part().1)
}

pub fn branch_locus(section: &BiSection) -> Result<BranchLocus> {
    let p_inf = section.p_inf.dehomogenize();
    let p_zero = section.p_zero.dehomogenize();
    if !smoothness_check(&p_inf, &p_zero)? {
        return Err(Error::Precondition("s' = 0 is not known to be smooth".into()));
    }
    // the discriminant of a binary quartic has degree 6 in its coefficients,
    // each of degree at most 2 in u
    const DEG: usize = 12;
    let mut samples = Vec::new();
    let mut u = 0i64;
    while samples.len() < DEG + 4 {
        let fib = section.fiber(&rat(u));
        if fib.degree() == Some(4) {
            samples.push((rat(u), poly_discriminant(&fib)?));
        }
        u += 1;
    }
    let disc = interpolate(&samples[..=DEG]);
    if samples[DEG + 1..].iter().any(|(u, y)| &disc.eval(u) != y) {
        return Err(Error::Factorization("discriminant interpolation is inconsistent".into()));
    }
    let fac = factor_unbounded(&disc)?;
    let mut factors: Vec<(Poly, u32)> = fac.factors.iter().map(|(f, m)| (normalize(f), *m)).collect();
    factors.sort_by_key(|a| (a.0.degree(), a.0.to_string()));
    Ok(BranchLocus {
        discriminant: disc,
        factors,
        contains_infinity: poly_discriminant(&p_inf)?.is_zero(),
    })
}

/// `(u + 4)^3 - 16`, whose roots are the affine branch points `2∛2 ζ - 4`
/// of `(w0 : w1 : w2) -> (w0 - 4 w2 : w2)`; the map is also branched at `(1 : 0)`.
pub fn gamma_branch_poly() -> (Poly, bool) {
    let shifted = Poly::from_ints(&[4, 1]).pow(3);
    (&shifted - &Poly::from_ints(&[16]), true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disjointness {
    pub disjoint: bool,
    pub resultants: Vec<Rational>,
    /// Degrees of the irreducible factors on each side; unequal degrees
    /// already rule out common roots.
    pub degrees_r: Vec<usize>,
    pub degrees_g: Vec<usize>,
}

pub fn branch_disjointness(
    r_polys: &[Poly],
    r_infinity: bool,
    g: &Poly,
    g_infinity: bool,
) -> Result<Disjointness> {
    let resultants = r_polys.iter().map(|h| poly_resultant(g, h)).collect::<Result<Vec<_>>>()?;
    let degrees_r = r_polys.iter().filter_map(|h| h.degree()).collect();
    let degrees_g = poly_factor_rational(g)?.factors.iter().filter_map(|(f, _)| f.degree()).collect();
    let disjoint = resultants.iter().all(|r| !r.is_zero()) && !(r_infinity && g_infinity);
    Ok(Disjointness { disjoint, resultants, degrees_r, degrees_g })
}
