//! The curves `y^2 = x^3 + B`: chord-tangent arithmetic, Nagell–Lutz torsion,
//! bounded point search, points over `Q(√d)`, and the map
//! `(w0 : w1 : w2) -> (w0 - 4 w2 : w2)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::local::{ExtElem, QuadField};
use crate::rational::{exact_cbrt, rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EllipticCurveQ {
    pub b: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EcPoint {
    Infinity,
    Affine(Rational, Rational),
}

impl fmt::Display for EcPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EcPoint::Infinity => f.write_str("(0:1:0)"),
            EcPoint::Affine(x, y) => write!(f, "({x}:{y}:1)"),
        }
    }
}

impl EllipticCurveQ {
    pub fn new(b: i64) -> Result<Self> {
        if b == 0 {
            return Err(Error::Precondition("y^2 = x^3 is singular".into()));
        }
        Ok(Self { b })
    }

    /// `-432 B^2`.
    pub fn discriminant(&self) -> BigInt {
        BigInt::from(-432) * BigInt::from(self.b).pow(2)
    }

    pub fn contains(&self, p: &EcPoint) -> bool {
        match p {
            EcPoint::Infinity => true,
            EcPoint::Affine(x, y) => y * y == x * x * x + rat(self.b),
        }
    }

    pub fn neg(&self, p: &EcPoint) -> EcPoint {
        match p {
            EcPoint::Infinity => EcPoint::Infinity,
            EcPoint::Affine(x, y) => EcPoint::Affine(x.clone(), -y),
        }
    }

    pub fn add(&self, p: &EcPoint, q: &EcPoint) -> EcPoint {
        let (EcPoint::Affine(x1, y1), EcPoint::Affine(x2, y2)) = (p, q) else {
            return if *p == EcPoint::Infinity { q.clone() } else { p.clone() };
        };
        let lambda = if x1 != x2 {
            (y2 - y1) / (x2 - x1)
        } else if y1 == y2 && !y1.is_zero() {
            rat(3) * x1 * x1 / (rat(2) * y1)
        } else {
            return EcPoint::Infinity;
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        EcPoint::Affine(x3, y3)
    }

    pub fn mul(&self, n: i64, p: &EcPoint) -> EcPoint {
        let base = if n < 0 { self.neg(p) } else { p.clone() };
        (0..n.unsigned_abs()).fold(EcPoint::Infinity, |acc, _| self.add(&acc, &base))
    }

    /// Order of `p` if it is at most `bound`.
    pub fn order(&self, p: &EcPoint, bound: u32) -> Option<u32> {
        let mut q = p.clone();
        for n in 1..=bound {
            if q == EcPoint::Infinity {
                return Some(n);
            }
            q = self.add(&q, p);
        }
        None
    }
}

fn divisors_squared_dividing(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut y = BigInt::one();
    while &y * &y <= *n {
        if (n % (&y * &y)).is_zero() {
            out.push(y.clone());
        }
        y += 1;
    }
    out
}

/// Torsion subgroup of `y^2 = x^3 + B` by Nagell–Lutz: integral points with
/// `y = 0` or `y^2 | 432 B^2`, kept when their order is at most 12.
pub fn ec_torsion(b: i64) -> Result<Vec<EcPoint>> {
    let e = EllipticCurveQ::new(b)?;
    let bound = -e.discriminant();
    let mut ys = vec![BigInt::zero()];
    for y in divisors_squared_dividing(&bound) {
        ys.push(-&y);
        ys.push(y);
    }
    let mut pts = vec![EcPoint::Infinity];
    for y in ys {
        if let Some(x) = exact_cbrt(&(&y * &y - BigInt::from(b))) {
            let p = EcPoint::Affine(Rational::from_integer(x), Rational::from_integer(y));
            if e.contains(&p) && e.order(&p, 12).is_some() {
                pts.push(p);
            }
        }
    }
    pts.sort();
    pts.dedup();
    Ok(pts)
}

fn isqrt_u128(n: u128) -> u128 {
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Affine points `(m/e^2, n/e^3)` with `|m| <= max_num` and `e <= max_den`.
pub fn rational_point_search(b: i64, max_num: i64, max_den: i64) -> Vec<EcPoint> {
    let mut found = Vec::new();
    for e in 1..=max_den {
        let e6 = (e as i128).pow(6);
        for m in -max_num..=max_num {
            let rhs = (m as i128).pow(3) + b as i128 * e6;
            if rhs < 0 {
                continue;
            }
            let r = isqrt_u128(rhs as u128);
            if r * r == rhs as u128 {
                let x = Rational::new(m.into(), (e * e).into());
                let y = Rational::new((r as i64).into(), (e * e * e).into());
                for p in [EcPoint::Affine(x.clone(), y.clone()), EcPoint::Affine(x.clone(), -y.clone())] {
                    if !found.contains(&p) {
                        found.push(p);
                    }
                }
            }
        }
    }
    found.sort();
    found
}

/// A projective point `(w0 : w1 : w2)` over `Q(√d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtPoint {
    pub w: [ExtElem; 3],
}

impl ExtPoint {
    pub fn new(w0: ExtElem, w1: ExtElem, w2: ExtElem) -> Result<Self> {
        if w0.is_zero() && w1.is_zero() && w2.is_zero() {
            return Err(Error::Precondition("(0:0:0) is not a projective point".into()));
        }
        Ok(Self { w: [w0, w1, w2] })
    }

    pub fn rational(field: QuadField, w0: i64, w1: i64, w2: i64) -> Result<Self> {
        let r = |n| field.from_rational(rat(n));
        Self::new(r(w0), r(w1), r(w2))
    }

    pub fn neg(&self) -> Self {
        Self { w: [self.w[0].clone(), -&self.w[1], self.w[2].clone()] }
    }
}

impl fmt::Display for ExtPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{}:{})", self.w[0], self.w[1], self.w[2])
    }
}

/// `w1^2 w2 = w0^3 + B w2^3`, exactly.
pub fn ec_point_check(e: &EllipticCurveQ, p: &ExtPoint) -> bool {
    let [w0, w1, w2] = &p.w;
    let bw = w0.field.from_rational(rat(e.b));
    let lhs = &(w1 * w1) * w2;
    let rhs = &(&(w0 * w0) * w0) + &(&bw * &(&(w2 * w2) * w2));
    lhs == rhs
}

/// A point of `P^1` over `Q(√d)`, normalized to `(u : 1)` or `(1 : 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P1Point {
    pub u0: ExtElem,
    pub u1: ExtElem,
}

impl P1Point {
    pub fn normalized(u0: ExtElem, u1: ExtElem) -> Result<Self> {
        let field = u0.field;
        if u1.is_zero() {
            if u0.is_zero() {
                return Err(Error::Precondition("(0:0) is not a point of P^1".into()));
            }
            return Ok(Self { u0: field.from_rational(rat(1)), u1 });
        }
        let inv = u1.inv()?;
        Ok(Self { u0: &u0 * &inv, u1: field.from_rational(rat(1)) })
    }

    pub fn infinity(field: QuadField) -> Self {
        Self { u0: field.from_rational(rat(1)), u1: field.from_rational(rat(0)) }
    }

    pub fn affine(field: QuadField, u: Rational) -> Self {
        Self { u0: field.from_rational(u), u1: field.from_rational(rat(1)) }
    }
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.u0, self.u1)
    }
}

/// `(w0 : w1 : w2) -> (w0 - 4 w2 : w2)` on `y^2 = x^3 - 16`, sending the
/// origin `(0:1:0)` to `(1:0)`.
pub fn gamma_eval(p: &ExtPoint) -> Result<P1Point> {
    let e = EllipticCurveQ::new(-16)?;
    if !ec_point_check(&e, p) {
        return Err(Error::NotOnCurve);
    }
    let [w0, _, w2] = &p.w;
    if w2.is_zero() {
        return Ok(P1Point::infinity(w0.field));
    }
    let four = w0.field.from_rational(rat(4));
    P1Point::normalized(w0 - &(&four * w2), w2.clone())
}
