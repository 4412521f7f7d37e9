//! Châtelet surfaces `y^2 - a z^2 = P(x)`, the quaternion class `(a, Q(x))`,
//! local points and local invariants.

pub mod certificate;
pub mod enumerate;
pub mod profile;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::factor::poly_factor_rational;
use crate::arith::jacobi::jacobi_u64;
use crate::arith::poly::{poly_discriminant, Poly};
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_q, Invariant, Symbol};
use crate::local::{splitting_type, Place, QuadField, SplittingType};
use crate::rational::{format_rational, is_prime, next_prime, rat, ratio, Rational};

pub use certificate::{wa_failure_certificate, WaFailureCertificate};
pub use profile::{
    ext_invariant_value_set, invariant_value_set, prove_invariant_zero, PlaceProfile, ProofRule,
    Provenance,
};

/// Default bound on the prime scan in [`find_prime_pair`].
pub const DEFAULT_SCAN_BOUND: u64 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ChateletSurface {
    pub a: Rational,
    pub p: Poly,
    pub factors: Option<(Poly, Poly)>,
    /// `(p1, p2)` when built by [`build_v0`].
    pub family: Option<(u64, u64)>,
}

impl ChateletSurface {
    pub fn new(a: Rational, p: Poly) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::ZeroArgument { what: "ChateletSurface::new" });
        }
        if p.degree() != Some(4) {
            return Err(Error::Degree { got: p.degree_i64(), range: "4" });
        }
        if poly_discriminant(&p)?.is_zero() {
            return Err(Error::NotSeparable);
        }
        Ok(Self { a, p, factors: None, family: None })
    }

    pub fn with_factors(a: Rational, p1: Poly, p2: Poly) -> Result<Self> {
        let mut s = Self::new(a, &p1 * &p2)?;
        s.factors = Some((p1, p2));
        Ok(s)
    }

    pub fn equation(&self) -> String {
        let rhs = match &self.factors {
            Some((f, g)) => format!("({f})({g})"),
            None => self.p.to_string(),
        };
        format!("y^2 - {}z^2 = {}", self.a, rhs)
    }

    /// Rational roots of `P`, giving the points `(x, 0, 0)`.
    pub fn rational_roots(&self) -> Result<Vec<Rational>> {
        let fac = poly_factor_rational(&self.p)?;
        let mut roots: Vec<Rational> = fac
            .factors
            .iter()
            .filter(|(f, _)| f.degree() == Some(1))
            .map(|(f, _)| -f.coeff(0) / f.coeff(1))
            .collect();
        roots.sort();
        Ok(roots)
    }

    /// Whether `P` has a factor `x^2 - a` (a norm form), which makes the
    /// surface satisfy weak approximation.
    pub fn has_norm_factor(&self) -> bool {
        let q = Poly::new(vec![-self.a.clone(), Rational::zero(), Rational::one()]);
        self.p.rem(&q).is_zero()
    }
}

impl fmt::Display for ChateletSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.equation())
    }
}

/// The class `(a, Q(x))` with a list of equal representations.
#[derive(Debug, Clone, PartialEq)]
pub struct BrauerClass {
    pub a: Rational,
    pub reps: Vec<Poly>,
}

impl BrauerClass {
    pub fn new(a: Rational, reps: Vec<Poly>) -> Result<Self> {
        if reps.is_empty() {
            return Err(Error::Precondition("a Brauer class needs a representation".into()));
        }
        Ok(Self { a, reps })
    }

    /// First representation not vanishing at `x`.
    pub fn rep_at(&self, x: &Rational) -> Result<(usize, Rational)> {
        self.reps
            .iter()
            .enumerate()
            .map(|(i, q)| (i, q.eval(x)))
            .find(|(_, y)| !y.is_zero())
            .ok_or_else(|| Error::AllRepresentationsVanish(x.clone()))
    }
}

/// Smallest `p1 ≡ 1 mod 8` split in `Q(√d)` outside `excluded`, then the
/// smallest prime `p2` with `(p2 | p1) = -1`.
pub fn find_prime_pair(d: QuadField, excluded: &BTreeSet<u64>, bound: u64) -> Result<(u64, u64)> {
    let mut p1 = 17u64;
    loop {
        if p1 > bound {
            return Err(Error::BoundExceeded(bound));
        }
        if p1 % 8 == 1
            && is_prime(p1)
            && !excluded.contains(&p1)
            && splitting_type(d, p1) == SplittingType::Split
        {
            break;
        }
        p1 += 8;
    }
    let mut p2 = 2u64;
    while jacobi_u64(p2 % p1, p1) != -1 {
        p2 = next_prime(p2);
    }
    Ok((p1, p2))
}

/// `y^2 - p1 z^2 = (p2 x^2 + 1)((1 + p2/p1^2) x^2 + 1/p1^2)` and the class
/// `(p1, p2 x^2 + 1) = (p1, (1 + p2/p1^2) x^2 + 1/p1^2)`.
pub fn build_v0(p1: u64, p2: u64) -> Result<(ChateletSurface, BrauerClass)> {
    for p in [p1, p2] {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
    }
    if p1 % 8 != 1 {
        return Err(Error::Precondition(format!("p1 = {p1} is not 1 mod 8")));
    }
    if jacobi_u64(p2 % p1, p1) != -1 {
        return Err(Error::Precondition(format!("({p2} | {p1}) is not -1")));
    }
    let (a, b) = (p1 as i64, p2 as i64);
    let q1 = Poly::new(vec![rat(1), rat(0), rat(b)]);
    let q2 = Poly::new(vec![ratio(1, a * a), rat(0), ratio(a * a + b, a * a)]);
    let mut s = ChateletSurface::with_factors(rat(a), q1.clone(), q2.clone())?;
    s.family = Some((p1, p2));
    Ok((s, BrauerClass::new(rat(a), vec![q1, q2])?))
}

/// `y^2 - 73 z^2 = (1 - x^2)(x^2 - 73)`-type surfaces: `(1 - x^2)(x^2 - a)`.
pub fn build_norm_surface(a: i64) -> Result<ChateletSurface> {
    ChateletSurface::with_factors(
        rat(a),
        Poly::from_ints(&[1, 0, -1]),
        Poly::from_ints(&[-a, 0, 1]),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalPointWitness {
    /// `P(x) != 0` and `(a, P(x))_v = +1`.
    Point(Rational),
    /// `P(x) = 0`: the point `(x, 0, 0)`.
    Root(Rational),
}

impl LocalPointWitness {
    pub fn x(&self) -> &Rational {
        match self {
            LocalPointWitness::Point(x) | LocalPointWitness::Root(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalPoint {
    Found(LocalPointWitness),
    Empty(String),
    Inconclusive { depth: u32 },
}

pub fn is_local_point(v: &ChateletSurface, place: Place, x: &Rational) -> Result<bool> {
    let y = v.p.eval(x);
    Ok(y.is_zero() || hilbert_q(&v.a, &y, place)? == Symbol::Plus)
}

fn real_candidates() -> Vec<Rational> {
    let mut xs = vec![rat(0)];
    for k in 1..=64i64 {
        xs.push(ratio(k, 8));
        xs.push(ratio(-k, 8));
    }
    for e in 4..=40u32 {
        xs.push(Rational::from_integer(BigInt::from(2).pow(e)));
    }
    xs
}

pub fn has_local_point(v: &ChateletSurface, place: Place, depth: u32) -> Result<LocalPoint> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if is_local_point(v, place, &rat(0))? {
        let w = if v.p.eval(&rat(0)).is_zero() {
            LocalPointWitness::Root(rat(0))
        } else {
            LocalPointWitness::Point(rat(0))
        };
        return Ok(LocalPoint::Found(w));
    }
    if let Some(r) = v.rational_roots()?.into_iter().next() {
        return Ok(LocalPoint::Found(LocalPointWitness::Root(r)));
    }
    match place {
        Place::Real => {
            for x in real_candidates() {
                if is_local_point(v, place, &x)? {
                    return Ok(LocalPoint::Found(LocalPointWitness::Point(x)));
                }
            }
            if v.a.is_negative() && v.p.count_real_roots() == 0 && v.p.leading().is_negative() {
                return Ok(LocalPoint::Empty("a < 0 and P is negative definite".into()));
            }
            Ok(LocalPoint::Inconclusive { depth })
        }
        Place::Finite(p) => {
            for j in enumerate::scales(depth) {
                for t in enumerate::unit_residues(p) {
                    let x = enumerate::sample_x(p, j, t);
                    if is_local_point(v, place, &x)? {
                        return Ok(LocalPoint::Found(LocalPointWitness::Point(x)));
                    }
                }
            }
            Ok(LocalPoint::Inconclusive { depth })
        }
    }
}

/// Local invariant of `A` at the point of `V(Q_v)` above `x`.
pub fn invariant_at(v: &ChateletSurface, a: &BrauerClass, place: Place, x: &Rational) -> Result<Invariant> {
    if !is_local_point(v, place, x)? {
        return Err(Error::NotLocalPoint(x.clone()));
    }
    let (_, q) = a.rep_at(x)?;
    Ok(hilbert_q(&a.a, &q, place)?.invariant())
}

pub fn describe_x(x: &Rational) -> String {
    format_rational(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::primes_upto;

    fn q(d: i64) -> QuadField {
        QuadField::new(d).unwrap()
    }

    #[test]
    fn prime_pair_examples() {
        let none = BTreeSet::new();
        assert_eq!(find_prime_pair(q(3), &none, DEFAULT_SCAN_BOUND).unwrap(), (73, 5));
        assert_eq!(find_prime_pair(q(2), &none, DEFAULT_SCAN_BOUND).unwrap(), (17, 3));
        assert_eq!(find_prime_pair(q(5), &none, DEFAULT_SCAN_BOUND).unwrap(), (41, 3));
        assert!(matches!(find_prime_pair(q(3), &none, 50), Err(Error::BoundExceeded(50))));
    }

    /// Independent scan: squares enumerated by hand instead of Jacobi symbols.
    fn brute_pair(d: i64, excluded: &BTreeSet<u64>) -> (u64, u64) {
        let is_qr = |a: i64, p: u64| (1..p).any(|y| (y * y) % p == a.rem_euclid(p as i64) as u64);
        let p1 = primes_upto(10_000)
            .into_iter()
            .find(|&p| p % 8 == 1 && !excluded.contains(&p) && d.rem_euclid(p as i64) != 0 && is_qr(d, p))
            .unwrap();
        let p2 = primes_upto(p1).into_iter().find(|&r| !is_qr(r as i64, p1)).unwrap();
        (p1, p2)
    }

    #[test]
    fn prime_pair_matches_brute_force_and_exclusion() {
        for d in [2i64, 3, 5, 6, 7, -1, -3, 11, 13, 21] {
            let mut ex = BTreeSet::new();
            for _ in 0..3 {
                let pair = find_prime_pair(q(d), &ex, DEFAULT_SCAN_BOUND).unwrap();
                assert_eq!(pair, brute_pair(d, &ex), "d={d} ex={ex:?}");
                assert_eq!(find_prime_pair(q(d), &ex, DEFAULT_SCAN_BOUND).unwrap(), pair);
                let (p1, p2) = pair;
                assert_eq!(p1 % 8, 1);
                assert_eq!(splitting_type(q(d), p1), SplittingType::Split);
                assert_eq!(hilbert_q(&rat(p1 as i64), &rat(p2 as i64), Place::Finite(p1)).unwrap(), Symbol::Minus);
                ex.insert(p1);
            }
        }
    }

    #[test]
    fn v0_examples() {
        let (s, a) = build_v0(73, 5).unwrap();
        let (f, g) = s.factors.clone().unwrap();
        assert_eq!(f, Poly::from_ints(&[1, 0, 5]));
        assert_eq!(g, Poly::new(vec![ratio(1, 5329), rat(0), ratio(5334, 5329)]));
        assert_eq!(s.p.eval(&rat(0)), ratio(1, 5329));
        assert_eq!(a.reps.len(), 2);
        let (s17, _) = build_v0(17, 3).unwrap();
        assert_eq!(s17.factors.unwrap().1, Poly::new(vec![ratio(1, 289), rat(0), ratio(292, 289)]));
        assert!(matches!(build_v0(73, 3), Err(Error::Precondition(_))));
        assert!(build_v0(41, 3).is_ok());
        assert!(matches!(build_v0(43, 3), Err(Error::Precondition(_))));
        assert!(matches!(build_v0(72, 5), Err(Error::NotPrime(72))));
        assert_eq!(
            s.equation(),
            "y^2 - 73z^2 = (5x^2 + 1)(5334/5329x^2 + 1/5329)"
        );
    }

    #[test]
    fn local_point_examples() {
        let (s, _) = build_v0(73, 5).unwrap();
        assert_eq!(
            has_local_point(&s, Place::Finite(73), 3).unwrap(),
            LocalPoint::Found(LocalPointWitness::Point(rat(0)))
        );
        assert!(matches!(has_local_point(&s, Place::Real, 1).unwrap(), LocalPoint::Found(_)));
        let vinf = build_norm_surface(73).unwrap();
        assert!(vinf.has_norm_factor());
        assert!(!s.has_norm_factor());
        for place in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(73)] {
            assert!(matches!(has_local_point(&vinf, place, 1).unwrap(), LocalPoint::Found(_)));
        }
        assert_eq!(vinf.rational_roots().unwrap(), vec![rat(-1), rat(1)]);
        let neg = ChateletSurface::new(rat(-1), Poly::from_ints(&[-1, 0, -1, 0, -1])).unwrap();
        assert!(matches!(has_local_point(&neg, Place::Real, 1).unwrap(), LocalPoint::Empty(_)));
    }

    #[test]
    fn invariant_examples() {
        let (s, a) = build_v0(73, 5).unwrap();
        assert_eq!(invariant_at(&s, &a, Place::Finite(73), &rat(0)).unwrap(), Invariant::Zero);
        assert_eq!(invariant_at(&s, &a, Place::Finite(73), &ratio(1, 73)).unwrap(), Invariant::Half);
        assert_eq!(invariant_at(&s, &a, Place::Finite(5), &rat(0)).unwrap(), Invariant::Zero);
    }

    #[test]
    fn surface_validation() {
        assert!(matches!(
            ChateletSurface::new(rat(3), Poly::from_ints(&[1, 0, -2, 0, 1])),
            Err(Error::NotSeparable)
        ));
        assert!(ChateletSurface::new(rat(3), Poly::from_ints(&[1, 0, 1])).is_err());
        assert!(ChateletSurface::new(rat(0), Poly::from_ints(&[1, 0, 0, 0, 1])).is_err());
    }
}
