//! Enumeration of `x`-coordinates at a place and fast evaluation of the
//! `Q_p` square class of `F(x)` for rational polynomials `F`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::poly::Poly;
use crate::hilbert::Symbol;
use crate::local::{square_class, unit_modulus, SquareClass};
use crate::rational::{int_valuation, inv_mod, pow_p, Rational};

/// Size budget for the residues `t` at one scale.
const RESIDUE_BUDGET: u64 = 1 << 17;

/// Residues `t` are taken mod `p^m`; `m` is 3 for small odd `p`, lowered as
/// `p` grows so that each scale holds at most `RESIDUE_BUDGET` residues.
pub fn residue_exponent(p: u64) -> u32 {
    if p == 2 {
        return 5;
    }
    (1..=3u32)
        .rev()
        .find(|&m| p.checked_pow(m).is_some_and(|q| q <= RESIDUE_BUDGET))
        .unwrap_or(1)
}

/// Scales `j` in search order: negative valuations first, then `0..=depth`.
pub fn scales(depth: u32) -> Vec<i64> {
    let d = depth as i64;
    (1..=d).map(|j| -j).chain(0..=d).collect()
}

/// Unit representatives `t` in `[1, p^m)`.
pub fn unit_residues(p: u64) -> impl Iterator<Item = u64> {
    let bound = p.pow(residue_exponent(p));
    (1..bound).filter(move |t| t % p != 0)
}

pub fn sample_x(p: u64, j: i64, t: u64) -> Rational {
    pow_p(p, j) * Rational::from_integer(t.into())
}

/// Number of sample points (besides `x = 0`) at depth `depth`.
pub fn sample_count(p: u64, depth: u32) -> u64 {
    let m = p.pow(residue_exponent(p));
    (m - m / p) * (2 * depth as u64 + 1)
}

/// Evaluates the square class of `F(p^j t)` in `Q_p` with word arithmetic
/// modulo `p^K < 2^32`, falling back to exact rationals when precision runs out.
pub struct ClassEvaluator {
    p: u64,
    k: u32,
    modulus: u64,
    ints: Vec<u64>,
    den_val: i64,
    den_unit_inv: u64,
    poly: Poly,
}

/// `F(p^j t)` as a polynomial in `t` with reduced coefficients.
pub struct ScaledEvaluator<'a> {
    ev: &'a ClassEvaluator,
    j: i64,
    coeffs: Vec<u64>,
    shift: i64,
}

impl ClassEvaluator {
    pub fn new(poly: &Poly, p: u64) -> Self {
        let mut k = 1u32;
        while p.pow(k + 1) < (1u64 << 32) {
            k += 1;
        }
        let modulus = p.pow(k);
        let den = poly.denominator_lcm();
        let m = BigInt::from(modulus);
        let ints = poly
            .coeffs()
            .iter()
            .map(|c| (c * Rational::from_integer(den.clone())).to_integer().mod_floor(&m).to_u64().unwrap())
            .collect();
        let den_val = int_valuation(&den, p) as i64;
        let um = unit_modulus(p);
        let den_unit = (&den / BigInt::from(p).pow(den_val as u32)).mod_floor(&BigInt::from(um));
        let den_unit_inv = inv_mod(den_unit.to_u64().unwrap(), um).unwrap();
        Self { p, k, modulus, ints, den_val, den_unit_inv, poly: poly.clone() }
    }

    fn mulm(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus
    }

    fn powm(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulm(acc, b);
            }
            b = self.mulm(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn at_scale(&self, j: i64) -> ScaledEvaluator<'_> {
        let n = self.ints.len().saturating_sub(1) as u64;
        let s = j.unsigned_abs();
        let coeffs = self
            .ints
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let e = if j >= 0 { s * i as u64 } else { s * (n - i as u64) };
                self.mulm(c, self.powm(self.p, e))
            })
            .collect();
        let shift = if j >= 0 { 0 } else { j * n as i64 };
        ScaledEvaluator { ev: self, j, coeffs, shift }
    }

    /// Square class of `F(p^j t)`; `None` when the value is exactly zero.
    pub fn class_at(&self, j: i64, t: u64) -> Option<SquareClass> {
        self.at_scale(j).class(t)
    }

    pub fn exact(&self, x: &Rational) -> Option<SquareClass> {
        let y = self.poly.eval(x);
        if y.is_zero() {
            None
        } else {
            Some(square_class(&y, self.p).expect("nonzero"))
        }
    }
}

impl ScaledEvaluator<'_> {
    pub fn class(&self, t: u64) -> Option<SquareClass> {
        let ev = self.ev;
        if ev.poly.is_zero() {
            return None;
        }
        let t = t % ev.modulus;
        let h = self.coeffs.iter().rev().fold(0u64, |acc, &c| (ev.mulm(acc, t) + c) % ev.modulus);
        let margin = if ev.p == 2 { 3 } else { 1 };
        if h != 0 {
            let mut v = 0u32;
            let mut u = h;
            while u % ev.p == 0 {
                u /= ev.p;
                v += 1;
            }
            if v + margin <= ev.k {
                let um = unit_modulus(ev.p);
                return Some(SquareClass {
                    valuation: v as i64 + self.shift - ev.den_val,
                    unit: (u % um) * ev.den_unit_inv % um,
                });
            }
        }
        ev.exact(&sample_x(ev.p, self.j, t))
    }
}

/// Hilbert symbols of square classes at one odd prime, via a table of
/// quadratic residues.
pub struct ResidueTable {
    p: u64,
    qr: Vec<bool>,
}

impl ResidueTable {
    pub fn new(p: u64) -> Self {
        let mut qr = vec![false; p as usize];
        for x in 1..p {
            qr[(x * x % p) as usize] = true;
        }
        Self { p, qr }
    }

    /// Same value as [`crate::hilbert::hilbert_from_classes`] for odd `p`.
    pub fn hilbert(&self, a: SquareClass, b: SquareClass) -> Symbol {
        let (alpha, beta) = (a.valuation & 1 == 1, b.valuation & 1 == 1);
        let mut plus = !(alpha && beta && self.p % 4 == 3);
        if beta && !self.qr[(a.unit % self.p) as usize] {
            plus = !plus;
        }
        if alpha && !self.qr[(b.unit % self.p) as usize] {
            plus = !plus;
        }
        Symbol::from_bool(plus)
    }
}
