//! Factorization over `Q` for small degrees: squarefree decomposition, then
//! per squarefree part a factorization modulo a small prime, multifactor
//! Hensel lifting and subset recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::poly::Poly;
use crate::arith::zp::ZpPoly;
use crate::error::{Error, Result};
use crate::rational::{is_prime, Rational};

pub const MAX_FACTOR_DEGREE: usize = 8;

/// `f = unit · ∏ factor^multiplicity`, each factor primitive integral with
/// positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Rational,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> Poly {
        self.factors.iter().fold(Poly::constant(self.unit.clone()), |acc, (f, m)| {
            &acc * &f.pow(*m)
        })
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

/// Irreducible factorization over `Q` of a polynomial of degree `1..=8`.
pub fn poly_factor_rational(f: &Poly) -> Result<Factorization> {
    let deg = f.degree().ok_or(Error::ZeroArgument { what: "poly_factor_rational" })?;
    if deg > MAX_FACTOR_DEGREE {
        return Err(Error::Degree { got: deg as i64, range: "0..=8" });
    }
    factor_unbounded(f)
}

/// Same algorithm without the degree cap; callers that know their input
/// splits into small squarefree parts use this directly.
pub(crate) fn factor_unbounded(f: &Poly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroArgument { what: "poly_factor_rational" });
    }
    let mut factors = Vec::new();
    for (part, mult) in f.squarefree_decomposition() {
        for g in factor_squarefree_integral(&part.primitive())? {
            factors.push((g, mult));
        }
    }
    factors.sort_by(|(a, ma), (b, mb)| {
        (a.degree(), ma, a.coeffs()).cmp(&(b.degree(), mb, b.coeffs()))
    });
    let prod = factors
        .iter()
        .fold(Poly::one(), |acc, (g, m)| &acc * &g.pow(*m));
    let unit = f.leading() / prod.leading();
    Ok(Factorization { unit, factors })
}

fn to_zp(f: &[BigInt], p: u64) -> ZpPoly {
    let pb = BigInt::from(p);
    ZpPoly::new(p, f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect())
}

fn int_coeffs(f: &Poly) -> Vec<BigInt> {
    f.coeffs().iter().map(|c| c.to_integer()).collect()
}

/// Factors a squarefree, primitive integer polynomial.
fn factor_squarefree_integral(f: &Poly) -> Result<Vec<Poly>> {
    let n = f.degree().unwrap();
    if n <= 1 {
        return Ok(vec![f.clone()]);
    }
    let fi = int_coeffs(f);
    let lc = fi.last().unwrap().clone();

    // Pick the prime giving the fewest modular factors among a few candidates.
    let mut best: Option<(u64, Vec<ZpPoly>)> = None;
    let mut tried = 0;
    let mut p = 3u64;
    while tried < 6 && p < 10_000 {
        if is_prime(p) && !(&lc % p).is_zero() {
            let fp = to_zp(&fi, p);
            if fp.gcd(&fp.derivative()).deg() == Some(0) {
                let facs = fp.monic().factor_squarefree();
                tried += 1;
                if facs.len() == 1 {
                    return Ok(vec![f.clone()]);
                }
                if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
                    best = Some((p, facs));
                }
            }
        }
        p += 2;
    }
    let (p, modular) =
        best.ok_or_else(|| Error::Factorization(format!("no good prime for {f}")))?;

    // Coefficient bound for factors of lc·f: |lc| · 2^n · (n+1) · max|coef|.
    let max_coef = fi.iter().map(|c| c.abs()).max().unwrap();
    let bound = lc.abs() * (BigInt::one() << n) * BigInt::from(n as u64 + 1) * max_coef;
    let mut k = 1u32;
    let pb = BigInt::from(p);
    let mut pk = pb.clone();
    while pk <= &bound * 2 {
        pk *= &pb;
        k += 1;
    }

    let lc_inv = mod_inverse(&lc, &pk);
    let target: Vec<BigInt> = fi.iter().map(|c| (c * &lc_inv).mod_floor(&pk)).collect();
    let lifted = multifactor_lift(&target, &modular, p, k);
    Ok(recombine(f, lifted, &pk))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "leading coefficient must be a unit mod p^k");
    e.x.mod_floor(m)
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    v
}

fn reduce(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    v.iter().map(|c| c.mod_floor(m)).collect()
}

fn from_zp(f: &ZpPoly) -> Vec<BigInt> {
    f.c.iter().map(|&c| BigInt::from(c)).collect()
}

/// Lifts monic modular factors of a polynomial that is monic mod `p^k`.
fn multifactor_lift(target: &[BigInt], factors: &[ZpPoly], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    if factors.len() == 1 {
        return vec![target.to_vec()];
    }
    let mid = factors.len() / 2;
    let g0 = factors[..mid].iter().fold(ZpPoly::one(p), |a, b| a.mul(b));
    let h0 = factors[mid..].iter().fold(ZpPoly::one(p), |a, b| a.mul(b));
    let (g, h) = lift_pair(target, &g0, &h0, p, k);
    let mut out = multifactor_lift(&g, &factors[..mid], p, k);
    out.extend(multifactor_lift(&h, &factors[mid..], p, k));
    out
}

/// Linear Hensel lifting of `target ≡ g0·h0 (mod p)` to `mod p^k`.
fn lift_pair(
    target: &[BigInt],
    g0: &ZpPoly,
    h0: &ZpPoly,
    p: u64,
    k: u32,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let (one, s, t) = g0.ext_gcd(h0);
    debug_assert_eq!(one, ZpPoly::one(p));
    let pb = BigInt::from(p);
    let mut g = from_zp(g0);
    let mut h = from_zp(h0);
    let mut pj = pb.clone();
    for _ in 1..k {
        let gh = int_mul(&g, &h);
        let len = target.len().max(gh.len());
        let diff: Vec<BigInt> = (0..len)
            .map(|i| {
                let a = target.get(i).cloned().unwrap_or_default();
                let b = gh.get(i).cloned().unwrap_or_default();
                let d = a - b;
                debug_assert!((&d % &pj).is_zero());
                d / &pj
            })
            .collect();
        let e = to_zp(&diff, p);
        let dg = t.mul(&e).rem(g0);
        let dh = s.mul(&e).rem(h0);
        let next = &pj * &pb;
        for (i, c) in dg.c.iter().enumerate() {
            g[i] += &pj * BigInt::from(*c);
        }
        for (i, c) in dh.c.iter().enumerate() {
            h[i] += &pj * BigInt::from(*c);
        }
        g = reduce(&g, &next);
        h = reduce(&h, &next);
        pj = next;
    }
    (g, h)
}

fn symmetric(v: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    v.iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect()
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

fn recombine(f: &Poly, mut lifted: Vec<Vec<BigInt>>, pk: &BigInt) -> Vec<Poly> {
    let mut found = Vec::new();
    let mut cur = f.clone();
    let mut size = 1;
    'outer: while 2 * size <= lifted.len() {
        for subset in subsets(lifted.len(), size) {
            let lc = cur.leading().to_integer();
            let prod = subset
                .iter()
                .fold(vec![lc], |acc, &i| reduce(&int_mul(&acc, &lifted[i]), pk));
            let cand = Poly::from_bigints(&symmetric(&prod, pk)).primitive();
            if let Some(q) = cur.exact_div(&cand) {
                if q.is_integral() {
                    found.push(cand);
                    cur = q;
                    for &i in subset.iter().rev() {
                        lifted.remove(i);
                    }
                    continue 'outer;
                }
            }
        }
        size += 1;
    }
    if cur.degree().unwrap_or(0) > 0 {
        found.push(cur.primitive());
    }
    found
}

/// Rational roots by the rational root theorem (test-oracle grade: only for
/// small coefficients).
pub fn rational_roots_bruteforce(f: &Poly) -> Vec<Rational> {
    let prim = f.primitive();
    let c = int_coeffs(&prim);
    let mut roots = Vec::new();
    if c[0].is_zero() {
        roots.push(Rational::zero());
    }
    let first_nz = c.iter().find(|x| !x.is_zero()).unwrap().abs();
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let n = n.to_u64().expect("small coefficient");
        (1..=n).filter(|d| n.is_multiple_of(*d)).map(BigInt::from).collect()
    };
    for num in divisors(&first_nz) {
        for den in divisors(&c.last().unwrap().abs()) {
            for s in [1i64, -1] {
                let r = Rational::new(&num * s, den.clone());
                if prim.eval(&r).is_zero() && !roots.contains(&r) {
                    roots.push(r);
                }
            }
        }
    }
    roots
}
