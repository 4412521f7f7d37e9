//! Places of `Q` and `Q(√d)`, local square classes, splitting types, and
//! valuations and residues at places of the quadratic field.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::finite_field::{sqrt_mod_prime, FieldDescriptor, FiniteFieldElem};
use crate::arith::jacobi::jacobi_u64;
use crate::arith::poly::Poly;
use crate::error::{Error, Result};
use crate::rational::{
    inv_mod, is_prime, mul_mod, pow_p, residue_mod, split_valuation, valuation, Rational,
};

/// A place of `Q`. `Real` sorts before every prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Real,
    Finite(u64),
}

impl Place {
    pub fn finite(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Real => None,
            Place::Finite(p) => Some(*p),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Place::Real => "real".into(),
            Place::Finite(p) => p.to_string(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "real" | "inf" | "oo" | "R" => Ok(Place::Real),
            t => {
                let p: u64 = t
                    .parse()
                    .map_err(|_| Error::Parse(format!("not a place: {s:?}")))?;
                Place::finite(p)
            }
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `Q(√d)` with `d` squarefree, `d ∉ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadField {
    d: i64,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::BadQuadField(d));
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn sqrt_d(&self) -> ExtElem {
        ExtElem::new(*self, Rational::zero(), Rational::one())
    }

    pub fn elem(&self, a: Rational, b: Rational) -> ExtElem {
        ExtElem::new(*self, a, b)
    }

    pub fn from_rational(&self, a: Rational) -> ExtElem {
        ExtElem::new(*self, a, Rational::zero())
    }
}

fn is_squarefree(d: i64) -> bool {
    let n = d.unsigned_abs();
    let mut q = 2u64;
    while q * q <= n {
        if n.is_multiple_of(q * q) {
            return false;
        }
        q += 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

pub fn splitting_type(field: QuadField, p: u64) -> SplittingType {
    let d = field.d();
    if p == 2 {
        return match d.rem_euclid(8) {
            1 => SplittingType::Split,
            5 => SplittingType::Inert,
            _ => SplittingType::Ramified,
        };
    }
    if d.rem_euclid(p as i64) == 0 {
        return SplittingType::Ramified;
    }
    match jacobi_u64(d.rem_euclid(p as i64) as u64, p) {
        1 => SplittingType::Split,
        _ => SplittingType::Inert,
    }
}

/// How an extension place sits over its base place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtPlaceKind {
    /// Index 1 sends `√d` to the root with the smaller residue (odd `p`) or
    /// the root `≡ 1 mod 4` (`p = 2`); index 2 to its negative.
    Split(u8),
    Inert,
    Ramified,
    /// Real embedding sending `√d` to `sign·|√d|`.
    RealEmbedding(i8),
    ComplexPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtPlace {
    pub base: Place,
    pub field: QuadField,
    pub kind: ExtPlaceKind,
}

impl ExtPlace {
    /// All places of `Q(√d)` over `v`, in label order.
    pub fn above(field: QuadField, v: Place) -> Vec<ExtPlace> {
        let mk = |kind| ExtPlace { base: v, field, kind };
        match v {
            Place::Real if field.d() > 0 => vec![
                mk(ExtPlaceKind::RealEmbedding(1)),
                mk(ExtPlaceKind::RealEmbedding(-1)),
            ],
            Place::Real => vec![mk(ExtPlaceKind::ComplexPair)],
            Place::Finite(p) => match splitting_type(field, p) {
                SplittingType::Split => {
                    vec![mk(ExtPlaceKind::Split(1)), mk(ExtPlaceKind::Split(2))]
                }
                SplittingType::Inert => vec![mk(ExtPlaceKind::Inert)],
                SplittingType::Ramified => vec![mk(ExtPlaceKind::Ramified)],
            },
        }
    }

    pub fn split(field: QuadField, p: u64, index: u8) -> Result<Self> {
        let place = ExtPlace { base: Place::finite(p)?, field, kind: ExtPlaceKind::Split(index) };
        if splitting_type(field, p) != SplittingType::Split || !(1..=2).contains(&index) {
            return Err(Error::BadPlace {
                place: place.label(),
                reason: format!("{p} does not split in Q(√{})", field.d()),
            });
        }
        Ok(place)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.base, Place::Finite(_))
    }

    pub fn residue_char(&self) -> Option<u64> {
        self.base.prime()
    }

    /// `"73+"`, `"73-"`, `"5i"`, `"3r"`, `"real+"`, `"real-"`, `"complex"`.
    pub fn label(&self) -> String {
        match (self.base, self.kind) {
            (Place::Finite(p), ExtPlaceKind::Split(1)) => format!("{p}+"),
            (Place::Finite(p), ExtPlaceKind::Split(_)) => format!("{p}-"),
            (Place::Finite(p), ExtPlaceKind::Inert) => format!("{p}i"),
            (Place::Finite(p), ExtPlaceKind::Ramified) => format!("{p}r"),
            (_, ExtPlaceKind::RealEmbedding(s)) if s > 0 => "real+".into(),
            (_, ExtPlaceKind::RealEmbedding(_)) => "real-".into(),
            _ => "complex".into(),
        }
    }

    pub fn parse(field: QuadField, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::Parse(format!("extension place {s:?}: {why}"));
        let (base, kind) = match s {
            "real+" => (Place::Real, ExtPlaceKind::RealEmbedding(1)),
            "real-" => (Place::Real, ExtPlaceKind::RealEmbedding(-1)),
            "complex" => (Place::Real, ExtPlaceKind::ComplexPair),
            _ => {
                let (num, tag) = s.split_at(s.len().saturating_sub(1));
                let p: u64 = num.parse().map_err(|_| bad("malformed"))?;
                let kind = match tag {
                    "+" => ExtPlaceKind::Split(1),
                    "-" => ExtPlaceKind::Split(2),
                    "i" => ExtPlaceKind::Inert,
                    "r" => ExtPlaceKind::Ramified,
                    _ => return Err(bad("unknown suffix")),
                };
                (Place::finite(p)?, kind)
            }
        };
        let w = ExtPlace { base, field, kind };
        if !ExtPlace::above(field, base).contains(&w) {
            return Err(bad(&format!("no such place of Q(√{})", field.d())));
        }
        Ok(w)
    }
}

impl fmt::Display for ExtPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `a + b√d`, exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtElem {
    pub field: QuadField,
    pub a: Rational,
    pub b: Rational,
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}√{}", self.b, self.field.d())
        } else {
            write!(f, "{} + {}√{}", self.a, self.b, self.field.d())
        }
    }
}

impl ExtElem {
    pub fn new(field: QuadField, a: Rational, b: Rational) -> Self {
        Self { field, a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.field, self.a.clone(), -&self.b)
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(self.field.d().into()) * &self.b * &self.b
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroArgument { what: "ExtElem::inv" });
        }
        let n = self.norm();
        Ok(Self::new(self.field, &self.a / &n, -&self.b / &n))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = self.field.from_rational(Rational::one());
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            n >>= 1;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.field, &self.a * c, &self.b * c)
    }

    /// Evaluates a rational polynomial at this element.
    pub fn eval_poly(&self, f: &Poly) -> Self {
        f.coeffs().iter().rev().fold(self.field.from_rational(Rational::zero()), |acc, c| {
            let mut next = &acc * self;
            next.a += c;
            next
        })
    }
}

impl Add for &ExtElem {
    type Output = ExtElem;
    fn add(self, o: &ExtElem) -> ExtElem {
        ExtElem::new(self.field, &self.a + &o.a, &self.b + &o.b)
    }
}

impl Sub for &ExtElem {
    type Output = ExtElem;
    fn sub(self, o: &ExtElem) -> ExtElem {
        ExtElem::new(self.field, &self.a - &o.a, &self.b - &o.b)
    }
}

impl Neg for &ExtElem {
    type Output = ExtElem;
    fn neg(self) -> ExtElem {
        ExtElem::new(self.field, -&self.a, -&self.b)
    }
}

impl Mul for &ExtElem {
    type Output = ExtElem;
    fn mul(self, o: &ExtElem) -> ExtElem {
        let d = Rational::from_integer(self.field.d().into());
        ExtElem::new(
            self.field,
            &self.a * &o.a + d * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}

/// Valuation and unit residue of a nonzero element of `Q_p`: `x = p^v · u`
/// with `u` read mod `p` (odd `p`) or mod 8 (`p = 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SquareClass {
    pub valuation: i64,
    pub unit: u64,
}

pub fn unit_modulus(p: u64) -> u64 {
    if p == 2 {
        8
    } else {
        p
    }
}

pub fn square_class(x: &Rational, p: u64) -> Result<SquareClass> {
    if x.is_zero() {
        return Err(Error::ZeroArgument { what: "square_class" });
    }
    let (v, u) = split_valuation(x, p);
    Ok(SquareClass { valuation: v, unit: residue_mod(&u, unit_modulus(p)) })
}

impl SquareClass {
    pub fn is_square(&self, p: u64) -> bool {
        self.valuation % 2 == 0
            && if p == 2 { self.unit == 1 } else { jacobi_u64(self.unit, p) == 1 }
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        SquareClass {
            valuation: self.valuation + o.valuation,
            unit: mul_mod(self.unit, o.unit, unit_modulus(p)),
        }
    }
}

pub fn padic_valuation(x: &Rational, p: u64) -> Option<i64> {
    valuation(x, p)
}

pub fn is_square_local(x: &Rational, v: Place) -> Result<bool> {
    if x.is_zero() {
        return Err(Error::ZeroArgument { what: "is_square_local" });
    }
    Ok(match v {
        Place::Real => x.is_positive(),
        Place::Finite(p) => square_class(x, p)?.is_square(p),
    })
}

/// `√d` in `Z_p` to precision `p^k` for the root selected by `index`.
pub fn split_root(field: QuadField, p: u64, index: u8, k: u32) -> Result<BigInt> {
    type RootCache = Mutex<HashMap<(i64, u64, u8, u32), BigInt>>;
    static ROOTS: OnceLock<RootCache> = OnceLock::new();
    let key = (field.d(), p, index, k);
    let cache = ROOTS.get_or_init(Default::default);
    if let Some(r) = cache.lock().expect("root cache").get(&key) {
        return Ok(r.clone());
    }
    let r = compute_split_root(field, p, index, k)?;
    cache.lock().expect("root cache").insert(key, r.clone());
    Ok(r)
}

fn compute_split_root(field: QuadField, p: u64, index: u8, k: u32) -> Result<BigInt> {
    if splitting_type(field, p) != SplittingType::Split {
        return Err(Error::BadPlace {
            place: p.to_string(),
            reason: "not split".into(),
        });
    }
    let d = BigInt::from(field.d());
    if p == 2 {
        let mut s = BigInt::one();
        let mut m = 3u32;
        while m < k + 1 {
            let next = BigInt::one() << (m + 1);
            if !(&s * &s - &d).mod_floor(&next).is_zero() {
                s += BigInt::one() << (m - 1);
            }
            m += 1;
        }
        let modulus = BigInt::one() << k;
        let s = s.mod_floor(&modulus);
        return Ok(if index == 1 { s } else { (-s).mod_floor(&modulus) });
    }
    let r = sqrt_mod_prime(field.d().rem_euclid(p as i64) as u64, p).expect("split prime");
    let r = if index == 1 { r } else { p - r };
    Ok(hensel_sqrt(&d, r, p, k))
}

/// Lifts a simple root `r` of `s^2 = target` mod an odd `p` to precision `p^k`.
pub(crate) fn hensel_sqrt(target: &BigInt, r: u64, p: u64, k: u32) -> BigInt {
    let pb = BigInt::from(p);
    let goal = pb.pow(k.max(1));
    let mut s = BigInt::from(r);
    let mut prec = pb;
    while prec < goal {
        prec = (&prec * &prec).min(goal.clone());
        let two_s_inv = (BigInt::from(2) * &s).extended_gcd(&prec).x.mod_floor(&prec);
        s = (&s - (&s * &s - target) * two_s_inv).mod_floor(&prec);
    }
    s.mod_floor(&goal)
}

/// Image of `x` in `Q_p` at a split place, as `(valuation, unit mod p^digits)`.
pub fn split_embed(x: &ExtElem, w: &ExtPlace, digits: u32) -> Result<(i64, BigInt)> {
    let ExtPlaceKind::Split(index) = w.kind else {
        return Err(Error::BadPlace { place: w.label(), reason: "not a split place".into() });
    };
    if x.is_zero() {
        return Err(Error::ZeroArgument { what: "split_embed" });
    }
    let p = w.residue_char().unwrap();
    let den = x.a.denom().lcm(x.b.denom());
    let big_a = (&x.a * Rational::from_integer(den.clone())).to_integer();
    let big_b = (&x.b * Rational::from_integer(den.clone())).to_integer();
    let vden = crate::rational::int_valuation(&den, p) as i64;
    let den_unit = &den / BigInt::from(p).pow(vden as u32);
    let pb = BigInt::from(p);
    let mut k = 16u32;
    loop {
        let s = split_root(w.field, p, index, k)?;
        let modulus = pb.pow(k);
        let img = (&big_a + &big_b * &s).mod_floor(&modulus);
        if !img.is_zero() {
            let v = crate::rational::int_valuation(&img, p);
            if v + digits <= k {
                let out_mod = pb.pow(digits);
                let unit = (&img / pb.pow(v)).mod_floor(&out_mod);
                let inv = den_unit.extended_gcd(&out_mod).x.mod_floor(&out_mod);
                return Ok((v as i64 - vden, (unit * inv).mod_floor(&out_mod)));
            }
        }
        k *= 2;
    }
}

/// A rational number in the same `Q_p` square class as the image of `x` at a
/// split place.
pub fn split_square_class_representative(x: &ExtElem, w: &ExtPlace) -> Result<Rational> {
    let p = w.residue_char().unwrap();
    let digits = if p == 2 { 3 } else { 1 };
    let (v, unit) = split_embed(x, w, digits)?;
    Ok(pow_p(p, v) * Rational::from_integer(unit))
}

/// Normalized valuation at a finite place of `Q(√d)`.
pub fn ext_valuation(x: &ExtElem, w: &ExtPlace) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::ZeroArgument { what: "ext_valuation" });
    }
    let Place::Finite(p) = w.base else {
        return Err(Error::BadPlace { place: w.label(), reason: "archimedean".into() });
    };
    if x.is_rational() {
        let v = valuation(&x.a, p).unwrap();
        return Ok(match w.kind {
            ExtPlaceKind::Ramified => 2 * v,
            _ => v,
        });
    }
    match w.kind {
        ExtPlaceKind::Split(_) => Ok(split_embed(x, w, 0)?.0),
        ExtPlaceKind::Inert => Ok(valuation(&x.norm(), p).unwrap() / 2),
        ExtPlaceKind::Ramified => Ok(valuation(&x.norm(), p).unwrap()),
        _ => unreachable!("finite base"),
    }
}

/// Residue field of a finite place with odd residue characteristic.
pub fn residue_field(w: &ExtPlace) -> Result<FieldDescriptor> {
    let p = w.residue_char().ok_or_else(|| Error::BadPlace {
        place: w.label(),
        reason: "archimedean".into(),
    })?;
    if p == 2 {
        return Err(Error::EvenResidueChar(w.label()));
    }
    match w.kind {
        ExtPlaceKind::Inert => FieldDescriptor::quadratic(p),
        _ => FieldDescriptor::prime(p),
    }
}

/// Image of `√d` in `F_{p^2} = F_p[t]/(t^2 - r)` at an inert place: `c·t` with
/// `c` the smaller square root of `d/r`.
pub fn inert_sqrt_d_image(field: QuadField, p: u64) -> Result<FiniteFieldElem> {
    let f = FieldDescriptor::quadratic(p)?;
    let d = field.d().rem_euclid(p as i64) as u64;
    let ratio = mul_mod(d, inv_mod(f.nonresidue, p).unwrap(), p);
    let c = sqrt_mod_prime(ratio, p).expect("d/r is a residue when d is a nonresidue");
    Ok(f.elem(0, c))
}

pub fn ext_residue(x: &ExtElem, w: &ExtPlace) -> Result<FiniteFieldElem> {
    let f = residue_field(w)?;
    if ext_valuation(x, w)? != 0 {
        return Err(Error::NotUnit(w.label()));
    }
    let p = f.p;
    match w.kind {
        ExtPlaceKind::Split(_) => {
            let (_, u) = split_embed(x, w, 1)?;
            Ok(f.elem(u.to_u64().unwrap(), 0))
        }
        ExtPlaceKind::Inert => {
            let a = f.elem(residue_mod(&x.a, p), 0);
            let b = f.elem(residue_mod(&x.b, p), 0);
            let s = inert_sqrt_d_image(w.field, p)?;
            Ok(a.add(&b.mul(&s)))
        }
        ExtPlaceKind::Ramified => Ok(f.elem(residue_mod(&x.a, p), 0)),
        _ => unreachable!("residue_field rejects archimedean places"),
    }
}

/// Sign of the image of `x` under a real embedding.
pub fn real_sign(x: &ExtElem, w: &ExtPlace) -> Result<i32> {
    let ExtPlaceKind::RealEmbedding(sigma) = w.kind else {
        return Err(Error::BadPlace { place: w.label(), reason: "not a real embedding".into() });
    };
    let a = crate::rational::signum(&x.a);
    let b = crate::rational::signum(&x.b) * sigma as i32;
    if b == 0 || a == b {
        return Ok(if a == 0 { b } else { a });
    }
    if a == 0 {
        return Ok(b);
    }
    // opposite signs: compare a^2 with d·b^2
    let lhs = &x.a * &x.a;
    let rhs = Rational::from_integer(w.field.d().into()) * &x.b * &x.b;
    Ok(if lhs > rhs { a } else { b })
}
