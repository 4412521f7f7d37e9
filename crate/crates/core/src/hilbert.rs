//! Hilbert symbols over `Q_v` and over completions of `Q(√d)`, the product
//! formula, and norm witnesses for `y^2 - a z^2 = N`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::finite_field::sqrt_mod_prime;
use crate::arith::jacobi::jacobi_u64;
use crate::error::{Error, Result};
use crate::local::{
    ext_residue, ext_valuation, hensel_sqrt, real_sign, split_square_class_representative,
    square_class, ExtElem, ExtPlace, ExtPlaceKind, Place, SquareClass,
};
use crate::rational::{is_perfect_square, isqrt, pow_p, prime_divisors, split_valuation, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    Plus,
    Minus,
}

impl Symbol {
    pub fn from_bool(is_plus: bool) -> Self {
        if is_plus {
            Symbol::Plus
        } else {
            Symbol::Minus
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Symbol::Plus => 1,
            Symbol::Minus => -1,
        }
    }

    pub fn invariant(self) -> Invariant {
        match self {
            Symbol::Plus => Invariant::Zero,
            Symbol::Minus => Invariant::Half,
        }
    }
}

impl Mul for Symbol {
    type Output = Symbol;
    fn mul(self, o: Symbol) -> Symbol {
        Symbol::from_bool(self == o)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Symbol::Plus { "+1" } else { "-1" })
    }
}

/// A local invariant in `{0, 1/2} ⊂ Q/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Invariant {
    Zero,
    Half,
}

impl Invariant {
    pub fn as_str(self) -> &'static str {
        match self {
            Invariant::Zero => "0",
            Invariant::Half => "1/2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(Invariant::Zero),
            "1/2" => Ok(Invariant::Half),
            other => Err(Error::Parse(format!("not an invariant: {other:?}"))),
        }
    }
}

impl Add for Invariant {
    type Output = Invariant;
    fn add(self, o: Invariant) -> Invariant {
        if self == o {
            Invariant::Zero
        } else {
            Invariant::Half
        }
    }
}

impl std::iter::Sum for Invariant {
    fn sum<I: Iterator<Item = Invariant>>(iter: I) -> Invariant {
        iter.fold(Invariant::Zero, |a, b| a + b)
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Invariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Invariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Invariant::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Hilbert symbol over `Q_p` from square-class data.
pub fn hilbert_from_classes(a: SquareClass, b: SquareClass, p: u64) -> Symbol {
    let (alpha, beta) = (a.valuation.rem_euclid(2), b.valuation.rem_euclid(2));
    if p == 2 {
        let eps = |u: u64| (u % 4 == 3) as i64;
        let omega = |u: u64| (u % 8 == 3 || u % 8 == 5) as i64;
        let e = eps(a.unit) * eps(b.unit) + alpha * omega(b.unit) + beta * omega(a.unit);
        return Symbol::from_bool(e % 2 == 0);
    }
    let mut s = 1i8;
    if alpha * beta == 1 && p % 4 == 3 {
        s = -s;
    }
    if beta == 1 {
        s *= jacobi_u64(a.unit, p);
    }
    if alpha == 1 {
        s *= jacobi_u64(b.unit, p);
    }
    Symbol::from_bool(s == 1)
}

pub fn hilbert_q(a: &Rational, b: &Rational, v: Place) -> Result<Symbol> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument { what: "hilbert_q" });
    }
    match v {
        Place::Real => Ok(Symbol::from_bool(a.is_positive() || b.is_positive())),
        Place::Finite(p) => Ok(hilbert_from_classes(square_class(a, p)?, square_class(b, p)?, p)),
    }
}

/// Tame symbol at a place of `Q(√d)` with odd residue characteristic.
pub fn hilbert_tame_ext(a: &ExtElem, b: &ExtElem, w: &ExtPlace) -> Result<Symbol> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument { what: "hilbert_tame_ext" });
    }
    match w.residue_char() {
        None => {
            return Err(Error::BadPlace { place: w.label(), reason: "archimedean".into() })
        }
        Some(2) => return Err(Error::EvenResidueChar(w.label())),
        Some(_) => {}
    }
    let alpha = ext_valuation(a, w)?;
    let beta = ext_valuation(b, w)?;
    let mut c = &a.pow(beta)? * &b.pow(-alpha)?;
    if (alpha * beta) % 2 != 0 {
        c = -&c;
    }
    Ok(Symbol::from_bool(ext_residue(&c, w)?.is_square()?))
}

/// Symbol `(a, b)` at any place of `Q(√d)`. Odd finite places use the tame
/// formula; places over 2 need `a` rational and use `(a, N(b))` over `Q_2`
/// (or the embedded image of `b` at a split place).
pub fn hilbert_ext(a: &ExtElem, b: &ExtElem, w: &ExtPlace) -> Result<Symbol> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument { what: "hilbert_ext" });
    }
    match w.kind {
        ExtPlaceKind::ComplexPair => Ok(Symbol::Plus),
        ExtPlaceKind::RealEmbedding(_) => {
            Ok(Symbol::from_bool(real_sign(a, w)? > 0 || real_sign(b, w)? > 0))
        }
        _ if w.residue_char() != Some(2) => hilbert_tame_ext(a, b, w),
        _ => {
            let (a, b) = if a.is_rational() {
                (a, b)
            } else if b.is_rational() {
                (b, a)
            } else {
                return Err(Error::EvenResidueChar(w.label()));
            };
            hilbert_rational_ext(&a.a, b, w)
        }
    }
}

/// `(a, b)` over `L_w` for rational `a`, computed over the base field:
/// `(a, N(b))_p` at nonsplit places, `(a, ι_w(b))_p` at split places.
pub fn hilbert_rational_ext(a: &Rational, b: &ExtElem, w: &ExtPlace) -> Result<Symbol> {
    let Place::Finite(p) = w.base else {
        return hilbert_ext(&w.field.from_rational(a.clone()), b, w);
    };
    match w.kind {
        ExtPlaceKind::Split(_) => hilbert_q(a, &split_square_class_representative(b, w)?, Place::Finite(p)),
        _ => hilbert_q(a, &b.norm(), Place::Finite(p)),
    }
}

/// Symbols `(a, b)_v` at the real place, at 2 and at every prime dividing
/// `a` or `b`; all other symbols are `+1`.
pub fn product_formula_check(a: &Rational, b: &Rational) -> Result<(bool, BTreeMap<Place, Symbol>)> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument { what: "product_formula_check" });
    }
    let mut places = vec![Place::Real, Place::Finite(2)];
    for n in [a.numer(), a.denom(), b.numer(), b.denom()] {
        for p in prime_divisors(&n.abs())? {
            places.push(Place::Finite(p));
        }
    }
    let mut out = BTreeMap::new();
    for v in places {
        out.insert(v, hilbert_q(a, b, v)?);
    }
    let product = out.values().fold(Symbol::Plus, |acc, s| acc * *s);
    Ok((product == Symbol::Plus, out))
}

fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() || !is_perfect_square(x.numer()) || !is_perfect_square(x.denom()) {
        return None;
    }
    Some(Rational::new(isqrt(x.numer()), isqrt(x.denom())))
}

/// Square root of `m` modulo `p^k` for a `Q_p`-square `m`, as a rational `y`
/// with `v_p(y^2 - m) >= k`.
fn padic_sqrt_approx(m: &Rational, p: u64, k: i64) -> Option<Rational> {
    let (v, unit) = split_valuation(m, p);
    if v % 2 != 0 {
        return None;
    }
    let half = v / 2;
    let prec = (k - v).max(1) as u32;
    let modulus = BigInt::from(p).pow(prec);
    let inv_den = unit.denom().extended_gcd(&modulus).x;
    let u = (unit.numer() * inv_den).mod_floor(&modulus);
    let r0 = sqrt_mod_prime((&u % p).try_into().ok()?, p)?;
    let s = hensel_sqrt(&u, r0, p, prec);
    Some(pow_p(p, half) * Rational::from_integer(s))
}

/// `(y, z)` with `v_p(y^2 - a z^2 - N) >= k`, or `None` when `(a, N)_p = -1`.
pub fn norm_witness_mod(
    a: &Rational,
    n: &Rational,
    p: u64,
    k: u32,
) -> Result<Option<(Rational, Rational)>> {
    if p == 2 || !crate::rational::is_prime(p) {
        return Err(Error::Precondition(format!("norm witness needs an odd prime, got {p}")));
    }
    if k == 0 {
        return Err(Error::Precondition("precision k must be at least 1".into()));
    }
    if n.is_zero() || a.is_zero() {
        return Err(Error::ZeroArgument { what: "norm_witness_mod" });
    }
    if hilbert_q(a, n, Place::Finite(p))? == Symbol::Minus {
        return Ok(None);
    }
    if let Some(y) = rational_sqrt(n) {
        return Ok(Some((y, Rational::zero())));
    }
    if let Some(z) = rational_sqrt(&(-n / a)) {
        return Ok(Some((Rational::zero(), z)));
    }
    let k = k as i64;
    let vn = split_valuation(n, p).0;
    let va = split_valuation(a, p).0;
    let centre = (vn - va).div_euclid(2);
    let span = k + 2;
    let scales: Vec<i64> = (0..=span).flat_map(|i| [centre + i, centre - i - 1]).collect();
    for t_bound in [p, p * p] {
        for &j in &scales {
            for t in (1..t_bound).filter(|t| t % p != 0) {
                let z = pow_p(p, j) * Rational::from_integer(t.into());
                let m = n + a * &z * &z;
                if m.is_zero() || !square_class(&m, p)?.is_square(p) {
                    continue;
                }
                let y = padic_sqrt_approx(&m, p, k)
                    .ok_or_else(|| Error::LiftFailed(m.to_string()))?;
                return Ok(Some((y, z)));
            }
        }
    }
    Err(Error::LiftFailed(format!("no norm witness for ({a}, {n}) at {p}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::local::{QuadField, ExtPlace};
    use crate::rational::{primes_upto, rat, ratio, valuation};
    use proptest::prelude::*;

    fn fin(p: u64) -> Place {
        Place::Finite(p)
    }

    #[test]
    fn hilbert_q_examples() {
        assert_eq!(hilbert_q(&rat(73), &rat(5), fin(73)).unwrap(), Symbol::Minus);
        assert_eq!(hilbert_q(&rat(73), &rat(-1), fin(73)).unwrap(), Symbol::Plus);
        assert_eq!(hilbert_q(&rat(2), &rat(5), fin(2)).unwrap(), Symbol::Minus);
        assert_eq!(hilbert_q(&rat(-1), &rat(-1), Place::Real).unwrap(), Symbol::Minus);
        assert!(hilbert_q(&rat(0), &rat(1), fin(3)).is_err());
    }

    #[test]
    fn tame_ext_examples() {
        let k = QuadField::new(3).unwrap();
        let inert5 = ExtPlace::above(k, fin(5))[0];
        let ram3 = ExtPlace::above(k, fin(3))[0];
        let r = |n| k.from_rational(rat(n));
        assert_eq!(hilbert_tame_ext(&r(73), &r(5), &inert5).unwrap(), Symbol::Plus);
        assert_eq!(hilbert_tame_ext(&k.sqrt_d(), &r(-1), &ram3).unwrap(), Symbol::Minus);
        assert_eq!(hilbert_tame_ext(&r(7), &k.elem(rat(2), rat(1)), &inert5).unwrap(), Symbol::Plus);
        let two = ExtPlace::above(k, fin(2))[0];
        assert!(matches!(hilbert_tame_ext(&r(3), &r(5), &two), Err(Error::EvenResidueChar(_))));
    }

    #[test]
    fn product_formula_examples() {
        let (ok, m) = product_formula_check(&rat(73), &rat(5)).unwrap();
        assert!(ok);
        assert_eq!(m[&fin(73)], Symbol::Minus);
        assert_eq!(m[&fin(5)], Symbol::Minus);
        assert_eq!(m[&Place::Real], Symbol::Plus);
        assert_eq!(m[&fin(2)], Symbol::Plus);
        let (ok, m) = product_formula_check(&rat(1), &rat(-35)).unwrap();
        assert!(ok && m.values().all(|s| *s == Symbol::Plus));
        let (ok, m) = product_formula_check(&rat(-1), &rat(-1)).unwrap();
        assert!(ok);
        let minus: Vec<_> = m.iter().filter(|(_, s)| **s == Symbol::Minus).map(|(v, _)| *v).collect();
        assert_eq!(minus, vec![Place::Real, fin(2)]);
    }

    fn check_witness(a: &Rational, n: &Rational, p: u64, k: u32, w: &(Rational, Rational)) {
        let (y, z) = w;
        let diff = y * y - a * z * z - n;
        assert!(diff.is_zero() || valuation(&diff, p).unwrap() >= k as i64, "{a} {n} {p}");
    }

    #[test]
    fn norm_witness_examples() {
        assert_eq!(
            norm_witness_mod(&rat(73), &rat(1), 73, 3).unwrap(),
            Some((rat(1), rat(0)))
        );
        assert_eq!(norm_witness_mod(&rat(73), &rat(5), 73, 3).unwrap(), None);
        let w = norm_witness_mod(&rat(73), &rat(-73), 73, 3).unwrap().unwrap();
        check_witness(&rat(73), &rat(-73), 73, 3, &w);
        assert!(norm_witness_mod(&rat(3), &rat(1), 2, 3).is_err());
    }

    #[test]
    fn norm_witnesses_exist_iff_symbol_plus() {
        for p in [3u64, 5, 7, 11, 73] {
            for a in [-10i64, -7, -5, -3, -2, -1, 1, 2, 3, 5, 7, 10, 73, 146] {
                for n in [-146i64, -73, -11, -6, -5, -3, -1, 1, 2, 3, 5, 6, 15, 73] {
                    let (a, n) = (rat(a), rat(n));
                    let w = norm_witness_mod(&a, &n, p, 6).unwrap();
                    let sym = hilbert_q(&a, &n, fin(p)).unwrap();
                    assert_eq!(w.is_some(), sym == Symbol::Plus);
                    if let Some(w) = w {
                        check_witness(&a, &n, p, 6, &w);
                    }
                }
            }
        }
        let w = norm_witness_mod(&ratio(5, 73), &ratio(-7, 5329), 73, 5).unwrap();
        if let Some(w) = w {
            check_witness(&ratio(5, 73), &ratio(-7, 5329), 73, 5, &w);
        }
    }

    /// Primitive solvability of `x0^2 = a x1^2 + b x2^2` mod `p^k`, by
    /// enumerating squares of `x1` and `x2`.
    fn conic_solvable_mod(a: i64, b: i64, p: u64, k: u32) -> bool {
        let m = p.pow(k) as i64;
        let mut is_sq = vec![false; m as usize];
        let mut is_unit_sq = vec![false; m as usize];
        for x in 0..m {
            let s = (x * x).rem_euclid(m) as usize;
            is_sq[s] = true;
            if x % p as i64 != 0 {
                is_unit_sq[s] = true;
            }
        }
        let squares: Vec<i64> = (0..m).filter(|&s| is_sq[s as usize]).collect();
        let pi = p as i64;
        for &s1 in &squares {
            for &s2 in &squares {
                let rhs = (a * s1 + b * s2).rem_euclid(m) as usize;
                let both_nonunit = s1 % pi == 0 && s2 % pi == 0;
                if (both_nonunit && is_unit_sq[rhs]) || (!both_nonunit && is_sq[rhs]) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn conic_oracle_agreement() {
        let vals = [1i64, -1, 2, -2, 3, -3, 5, -5, 7, -7, 10, -10];
        for &a in &vals {
            for &b in &vals {
                for (p, k) in [(2u64, 8u32), (3, 4), (5, 4), (7, 4), (73, 1)] {
                    // at 73 every argument is a unit, so solutions mod 73 lift
                    let sym = hilbert_q(&rat(a), &rat(b), fin(p)).unwrap();
                    assert_eq!(sym == Symbol::Plus, conic_solvable_mod(a, b, p, k), "({a},{b})_{p}");
                }
                let real = hilbert_q(&rat(a), &rat(b), Place::Real).unwrap();
                assert_eq!(real == Symbol::Minus, a < 0 && b < 0);
            }
        }
    }

    #[test]
    fn p_minus_one_at_p_one_mod_eight() {
        for p in primes_upto(10_000).into_iter().filter(|p| p % 8 == 1) {
            assert_eq!(hilbert_q(&rat(p as i64), &rat(-1), fin(p)).unwrap(), Symbol::Plus);
        }
    }

    #[test]
    fn invariant_arithmetic() {
        assert_eq!(Invariant::Half + Invariant::Half, Invariant::Zero);
        assert_eq!(Invariant::Zero + Invariant::Half, Invariant::Half);
        assert_eq!(Symbol::Minus.invariant(), Invariant::Half);
        let s: Invariant = [Invariant::Half, Invariant::Zero, Invariant::Half, Invariant::Half].into_iter().sum();
        assert_eq!(s, Invariant::Half);
        assert_eq!(serde_json::to_string(&Invariant::Half).unwrap(), "\"1/2\"");
    }

    fn nz_rat() -> impl Strategy<Value = Rational> {
        (-10_000i64..=10_000, 1i64..=10_000)
            .prop_filter("nonzero", |(n, _)| *n != 0)
            .prop_map(|(n, d)| ratio(n, d))
    }

    fn place() -> impl Strategy<Value = Place> {
        prop::sample::select(vec![Place::Real, fin(2), fin(3), fin(5), fin(7), fin(73)])
    }

    fn odd_prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![3u64, 5, 7, 11, 13, 73, 97])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn bilinear_and_symmetric(a in nz_rat(), b1 in nz_rat(), b2 in nz_rat(), v in place()) {
            let lhs = hilbert_q(&a, &(&b1 * &b2), v).unwrap();
            prop_assert_eq!(lhs, hilbert_q(&a, &b1, v).unwrap() * hilbert_q(&a, &b2, v).unwrap());
            prop_assert_eq!(hilbert_q(&a, &b1, v).unwrap(), hilbert_q(&b1, &a, v).unwrap());
        }

        #[test]
        fn steinberg(a in nz_rat(), v in place()) {
            prop_assert_eq!(hilbert_q(&a, &-&a, v).unwrap(), Symbol::Plus);
            let b = Rational::one() - &a;
            if !b.is_zero() {
                prop_assert_eq!(hilbert_q(&a, &b, v).unwrap(), Symbol::Plus);
            }
        }

        #[test]
        fn product_formula_holds(a in nz_rat(), b in nz_rat()) {
            prop_assert!(product_formula_check(&a, &b).unwrap().0);
        }

        #[test]
        fn even_valuations_give_plus(u in nz_rat(), w in nz_rat(), p in odd_prime(), i in -3i64..=3, j in -3i64..=3) {
            let clean = |x: &Rational| split_valuation(x, p).1;
            let a = clean(&u) * pow_p(p, 2 * i);
            let b = clean(&w) * pow_p(p, 2 * j);
            prop_assert_eq!(hilbert_q(&a, &b, fin(p)).unwrap(), Symbol::Plus);
        }

        #[test]
        fn symbol_ignores_higher_order_terms(a in nz_rat(), b in nz_rat(), c in nz_rat(), p in odd_prime(), shift in 1i64..4) {
            let vb = valuation(&b, p).unwrap();
            let vc = valuation(&c, p).unwrap();
            let c = &c * pow_p(p, vb - vc + shift);
            prop_assert_eq!(hilbert_q(&a, &(&b + &c), fin(p)).unwrap(), hilbert_q(&a, &b, fin(p)).unwrap());
        }
    }

    fn ext_pair() -> impl Strategy<Value = (ExtElem, ExtElem)> {
        let k = QuadField::new(3).unwrap();
        let r = || (-300i64..=300, 1i64..=300).prop_map(|(n, d)| ratio(n, d));
        (r(), r(), r(), r())
            .prop_map(move |(a, b, c, d)| (k.elem(a, b), k.elem(c, d)))
            .prop_filter("nonzero", |(x, y)| !x.is_zero() && !y.is_zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn tame_at_split_matches_embedded_images((x, y) in ext_pair(), idx in 1u8..=2) {
            let w = ExtPlace::split(QuadField::new(3).unwrap(), 73, idx).unwrap();
            let ix = split_square_class_representative(&x, &w).unwrap();
            let iy = split_square_class_representative(&y, &w).unwrap();
            prop_assert_eq!(hilbert_tame_ext(&x, &y, &w).unwrap(), hilbert_q(&ix, &iy, fin(73)).unwrap());
        }

        #[test]
        fn tame_matches_norm_route_for_rational_first_argument((x, y) in ext_pair(), which in 0usize..4) {
            let k = QuadField::new(3).unwrap();
            let places = [
                ExtPlace::above(k, fin(5))[0],
                ExtPlace::above(k, fin(3))[0],
                ExtPlace::above(k, fin(7))[0],
                ExtPlace::split(k, 11, 2).unwrap(),
            ];
            let w = places[which];
            let a = if x.a.is_zero() { x.b.clone() } else { x.a.clone() };
            let tame = hilbert_tame_ext(&k.from_rational(a.clone()), &y, &w).unwrap();
            prop_assert_eq!(tame, hilbert_rational_ext(&a, &y, &w).unwrap());
        }
    }
}
