//! Value sets of local invariants, by proof rule or by enumeration, over `Q`
//! and over `Q(√d)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;

use super::enumerate::{sample_x, scales, unit_residues, ClassEvaluator, ResidueTable, ScaledEvaluator};
use super::{invariant_at, is_local_point, real_candidates, BrauerClass, ChateletSurface};
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_ext, hilbert_from_classes, hilbert_tame_ext, Invariant, Symbol};
use crate::local::{
    ext_valuation, is_square_local, square_class, ExtElem, ExtPlace, ExtPlaceKind, Place,
    SquareClass,
};
use crate::rational::{format_rational, rat, valuation, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProofRule {
    /// `p1` is a square in the completion.
    A,
    /// Odd place, `p1` a unit, `p2` integral.
    B,
    /// Split place over `p1`: the completion is `Q_{p1}`.
    SplitReduction,
}

impl ProofRule {
    pub fn name(self) -> &'static str {
        match self {
            ProofRule::A => "rule-A",
            ProofRule::B => "rule-B",
            ProofRule::SplitReduction => "split-reduction",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            ProofRule::A => "p1 is a square in the completion, so every symbol (p1, Q(x)) is +1",
            ProofRule::B => {
                "odd place with p1 a unit and p2 integral: an invariant 1/2 forces \
                 v(p2 + x^-2) odd and positive, making the second representation a \
                 p1-multiple of a square times a unit square"
            }
            ProofRule::SplitReduction => "split place over p1: the completion equals Q_p1",
        }
    }
}

impl fmt::Display for ProofRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Proven(ProofRule),
    Enumerated { depth: u32, points: u64 },
    SplitReduction { depth: u32, points: u64 },
}

/// An `x`-coordinate in `Q` or in `Q(√d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XCoord {
    Q(Rational),
    L(ExtElem),
}

impl fmt::Display for XCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XCoord::Q(x) => f.write_str(&format_rational(x)),
            XCoord::L(x) if x.b.is_zero() => f.write_str(&format_rational(&x.a)),
            XCoord::L(x) => write!(
                f,
                "{} + {}*sqrt({})",
                format_rational(&x.a),
                format_rational(&x.b),
                x.field.d()
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvWitness {
    pub invariant: Invariant,
    pub x: XCoord,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceProfile {
    pub place: String,
    pub values: BTreeSet<Invariant>,
    pub provenance: Provenance,
    pub witnesses: Vec<InvWitness>,
}

fn family(v: &ChateletSurface) -> Result<(u64, u64)> {
    v.family
        .ok_or_else(|| Error::Precondition("surface is not of the V0 shape built by build_v0".into()))
}

pub fn prove_invariant_zero(v: &ChateletSurface, place: Place) -> Result<Option<ProofRule>> {
    let (p1, p2) = family(v)?;
    if is_square_local(&rat(p1 as i64), place)? {
        return Ok(Some(ProofRule::A));
    }
    Ok(match place {
        Place::Finite(p) if p != 2 && p1 % p != 0 && valuation(&rat(p2 as i64), p) >= Some(0) => {
            Some(ProofRule::B)
        }
        _ => None,
    })
}

/// The rule proving that all invariants vanish at a place of `Q(√d)`.
pub fn prove_invariant_zero_ext(v: &ChateletSurface, w: &ExtPlace) -> Result<Option<ProofRule>> {
    let (p1, _) = family(v)?;
    match w.base {
        Place::Real => Ok(Some(ProofRule::A)),
        Place::Finite(2) => prove_invariant_zero(v, Place::Finite(2)),
        Place::Finite(p) if p == p1 => Ok(None),
        // p1 stays a unit at w and p2 is a rational integer, so the odd-place
        // argument carries over verbatim to L_w
        Place::Finite(_) => Ok(Some(ProofRule::B)),
    }
}

/// Outcome of sampling points at one place.
#[derive(Debug, Clone, Default)]
pub struct EnumOutcome {
    pub witnesses: BTreeMap<Invariant, XCoord>,
    pub points: u64,
}

impl EnumOutcome {
    pub fn values(&self) -> BTreeSet<Invariant> {
        self.witnesses.keys().copied().collect()
    }

    fn record(&mut self, inv: Invariant, x: XCoord) {
        self.record_with(inv, || x);
    }

    fn record_with(&mut self, inv: Invariant, x: impl FnOnce() -> XCoord) {
        self.points += 1;
        self.witnesses.entry(inv).or_insert_with(x);
    }

    fn complete(&self) -> bool {
        self.witnesses.len() == 2
    }
}

/// Samples `x = 0` and `x = p^j t` (or a real grid) and collects the
/// invariants of `A` at the local points found.
pub fn enumerate_invariants(
    v: &ChateletSurface,
    a: &BrauerClass,
    place: Place,
    depth: u32,
    stop_early: bool,
) -> Result<EnumOutcome> {
    let mut out = EnumOutcome::default();
    let exact = |x: &Rational, out: &mut EnumOutcome| -> Result<()> {
        if is_local_point(v, place, x)? {
            out.record(invariant_at(v, a, place, x)?, XCoord::Q(x.clone()));
        }
        Ok(())
    };
    exact(&rat(0), &mut out)?;
    let p = match place {
        Place::Real => {
            for x in real_candidates() {
                exact(&x, &mut out)?;
                if stop_early && out.complete() {
                    break;
                }
            }
            return Ok(out);
        }
        Place::Finite(p) => p,
    };
    let factors: Vec<ClassEvaluator> = match &v.factors {
        Some((f, g)) => vec![ClassEvaluator::new(f, p), ClassEvaluator::new(g, p)],
        None => vec![ClassEvaluator::new(&v.p, p)],
    };
    let reps: Vec<ClassEvaluator> = a.reps.iter().map(|q| ClassEvaluator::new(q, p)).collect();
    let a_class = square_class(&a.a, p)?;
    let s_class = square_class(&v.a, p)?;
    let table = (p != 2).then(|| ResidueTable::new(p));
    let symbol = |x: SquareClass, y: SquareClass| match &table {
        Some(t) => t.hilbert(x, y),
        None => hilbert_from_classes(x, y, p),
    };
    for j in scales(depth) {
        let factors: Vec<ScaledEvaluator> = factors.iter().map(|ev| ev.at_scale(j)).collect();
        let reps: Vec<ScaledEvaluator> = reps.iter().map(|ev| ev.at_scale(j)).collect();
        for t in unit_residues(p) {
            let mut prod: Option<SquareClass> = Some(SquareClass { valuation: 0, unit: 1 });
            for ev in &factors {
                prod = match (prod, ev.class(t)) {
                    (Some(acc), Some(c)) => Some(acc.mul(&c, p)),
                    _ => None,
                };
            }
            let on_surface = match prod {
                None => true,
                Some(c) => symbol(s_class, c) == Symbol::Plus,
            };
            if !on_surface {
                continue;
            }
            let rep = reps.iter().find_map(|ev| ev.class(t));
            let Some(q) = rep else {
                return Err(Error::AllRepresentationsVanish(sample_x(p, j, t)));
            };
            let inv = symbol(a_class, q).invariant();
            out.record_with(inv, || XCoord::Q(sample_x(p, j, t)));
            if stop_early && out.complete() {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

fn witnesses_of(out: &EnumOutcome) -> Vec<InvWitness> {
    out.witnesses
        .iter()
        .map(|(inv, x)| InvWitness { invariant: *inv, x: x.clone() })
        .collect()
}

fn proven(place: String, rule: ProofRule, x: XCoord) -> PlaceProfile {
    PlaceProfile {
        place,
        values: BTreeSet::from([Invariant::Zero]),
        provenance: Provenance::Proven(rule),
        witnesses: vec![InvWitness { invariant: Invariant::Zero, x }],
    }
}

pub fn invariant_value_set(
    v: &ChateletSurface,
    a: &BrauerClass,
    place: Place,
    depth: u32,
) -> Result<PlaceProfile> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if v.family.is_some() {
        if let Some(rule) = prove_invariant_zero(v, place)? {
            let x = rat(0);
            if invariant_at(v, a, place, &x)? != Invariant::Zero {
                return Err(Error::Precondition(format!("x = 0 does not witness 0 at {place}")));
            }
            return Ok(proven(place.label(), rule, XCoord::Q(x)));
        }
    }
    let out = enumerate_invariants(v, a, place, depth, true)?;
    if out.points == 0 {
        return Err(Error::NoLocalPoints(place.label()));
    }
    Ok(PlaceProfile {
        place: place.label(),
        values: out.values(),
        provenance: Provenance::Enumerated { depth, points: out.points },
        witnesses: witnesses_of(&out),
    })
}

/// Profiles at the real place and every prime up to `bound`, plus the primes
/// of the family, computed in parallel and returned in place order.
pub fn profile_over_q(
    v: &ChateletSurface,
    a: &BrauerClass,
    bound: u64,
    depth: u32,
) -> Result<Vec<PlaceProfile>> {
    let mut places: BTreeSet<Place> = crate::rational::primes_upto(bound)
        .into_iter()
        .map(Place::Finite)
        .collect();
    places.insert(Place::Real);
    if let Some((p1, p2)) = v.family {
        places.insert(Place::Finite(p1));
        places.insert(Place::Finite(p2));
    }
    let places: Vec<Place> = places.into_iter().collect();
    places.par_iter().map(|&pl| invariant_value_set(v, a, pl, depth)).collect()
}

fn ext_point_invariant(
    v: &ChateletSurface,
    a: &BrauerClass,
    w: &ExtPlace,
    x: &ExtElem,
) -> Result<Option<Invariant>> {
    let field = w.field;
    let sym = |b: &ExtElem| -> Result<Symbol> {
        let lift = field.from_rational(v.a.clone());
        if w.is_finite() {
            hilbert_tame_ext(&lift, b, w)
        } else {
            hilbert_ext(&lift, b, w)
        }
    };
    let px = x.eval_poly(&v.p);
    if !px.is_zero() && sym(&px)? == Symbol::Minus {
        return Ok(None);
    }
    let q = a
        .reps
        .iter()
        .map(|q| x.eval_poly(q))
        .find(|y| !y.is_zero())
        .ok_or_else(|| Error::AllRepresentationsVanish(x.a.clone()))?;
    let lift_a = field.from_rational(a.a.clone());
    let s = if w.is_finite() { hilbert_tame_ext(&lift_a, &q, w)? } else { hilbert_ext(&lift_a, &q, w)? };
    Ok(Some(s.invariant()))
}

/// Samples `x = π^j u` with `u` running over unit residues `c0 + c1√d`
/// (`c0, c1 < p`) and evaluates symbols over `L_w` with the tame formula.
pub fn enumerate_ext(
    v: &ChateletSurface,
    a: &BrauerClass,
    w: &ExtPlace,
    depth: u32,
    stop_early: bool,
) -> Result<EnumOutcome> {
    let field = w.field;
    let mut out = EnumOutcome::default();
    let zero = field.from_rational(rat(0));
    if let Some(inv) = ext_point_invariant(v, a, w, &zero)? {
        out.record(inv, XCoord::L(zero));
    }
    let (p, pi) = match (w.base, w.kind) {
        (Place::Real, _) => {
            for c0 in -6i64..=6 {
                for c1 in -3i64..=3 {
                    let x = field.elem(Rational::new(c0.into(), 2.into()), rat(c1));
                    if let Some(inv) = ext_point_invariant(v, a, w, &x)? {
                        out.record(inv, XCoord::L(x));
                    }
                }
            }
            return Ok(out);
        }
        (Place::Finite(2), _) => return Err(Error::EvenResidueChar(w.label())),
        (Place::Finite(p), ExtPlaceKind::Ramified) => (p, field.sqrt_d()),
        (Place::Finite(p), _) => (p, field.from_rational(rat(p as i64))),
    };
    let units: Vec<ExtElem> = (0..p as i64)
        .flat_map(|c1| (0..p as i64).map(move |c0| (c0, c1)))
        .map(|(c0, c1)| field.elem(rat(c0), rat(c1)))
        .filter(|u| !u.is_zero() && ext_valuation(u, w).map(|v| v == 0).unwrap_or(false))
        .collect();
    for j in scales(depth) {
        let scale = pi.pow(j)?;
        for u in &units {
            let x = &scale * u;
            if let Some(inv) = ext_point_invariant(v, a, w, &x)? {
                out.record(inv, XCoord::L(x));
                if stop_early && out.complete() {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

pub fn ext_invariant_value_set(
    v: &ChateletSurface,
    a: &BrauerClass,
    w: &ExtPlace,
    depth: u32,
) -> Result<PlaceProfile> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if let (Some((p1, _)), ExtPlaceKind::Split(_)) = (v.family, w.kind) {
        if w.base == Place::Finite(p1) {
            let inner = invariant_value_set(v, a, Place::Finite(p1), depth)?;
            let points = match inner.provenance {
                Provenance::Enumerated { points, .. } => points,
                _ => 0,
            };
            return Ok(PlaceProfile {
                place: w.label(),
                provenance: Provenance::SplitReduction { depth, points },
                ..inner
            });
        }
    }
    if v.family.is_some() {
        if let Some(rule) = prove_invariant_zero_ext(v, w)? {
            let x = w.field.from_rational(rat(0));
            if w.residue_char() != Some(2) && ext_point_invariant(v, a, w, &x)? != Some(Invariant::Zero) {
                return Err(Error::Precondition(format!("x = 0 does not witness 0 at {}", w.label())));
            }
            return Ok(proven(w.label(), rule, XCoord::L(x)));
        }
    }
    let out = enumerate_ext(v, a, w, depth, true)?;
    if out.points == 0 {
        return Err(Error::NoLocalPoints(w.label()));
    }
    Ok(PlaceProfile {
        place: w.label(),
        values: out.values(),
        provenance: Provenance::Enumerated { depth, points: out.points },
        witnesses: witnesses_of(&out),
    })
}

/// Profiles at every place of `Q(√d)` over the real place and the primes up
/// to `bound` (and over `p1`, `p2`), in place order.
pub fn profile_over_ext(
    v: &ChateletSurface,
    a: &BrauerClass,
    field: crate::local::QuadField,
    bound: u64,
    depth: u32,
) -> Result<Vec<PlaceProfile>> {
    let mut bases: BTreeSet<Place> = crate::rational::primes_upto(bound)
        .into_iter()
        .map(Place::Finite)
        .collect();
    bases.insert(Place::Real);
    if let Some((p1, p2)) = v.family {
        bases.insert(Place::Finite(p1));
        bases.insert(Place::Finite(p2));
    }
    let places: Vec<ExtPlace> = bases.into_iter().flat_map(|b| ExtPlace::above(field, b)).collect();
    places.par_iter().map(|w| ext_invariant_value_set(v, a, w, depth)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chatelet::build_v0;
    use crate::local::QuadField;
    use crate::rational::{primes_upto, ratio};

    fn v0() -> (ChateletSurface, BrauerClass) {
        build_v0(73, 5).unwrap()
    }

    fn both() -> BTreeSet<Invariant> {
        BTreeSet::from([Invariant::Zero, Invariant::Half])
    }

    #[test]
    fn proof_rule_examples() {
        let (s, _) = v0();
        assert_eq!(prove_invariant_zero(&s, Place::Finite(2)).unwrap(), Some(ProofRule::A));
        assert_eq!(prove_invariant_zero(&s, Place::Real).unwrap(), Some(ProofRule::A));
        assert_eq!(prove_invariant_zero(&s, Place::Finite(7)).unwrap(), Some(ProofRule::B));
        assert_eq!(prove_invariant_zero(&s, Place::Finite(73)).unwrap(), None);
        let plain = ChateletSurface::new(rat(3), s.p.clone()).unwrap();
        assert!(prove_invariant_zero(&plain, Place::Finite(7)).is_err());
    }

    #[test]
    fn value_set_examples() {
        let (s, a) = v0();
        let at73 = invariant_value_set(&s, &a, Place::Finite(73), 3).unwrap();
        assert_eq!(at73.values, both());
        let half = at73.witnesses.iter().find(|w| w.invariant == Invariant::Half).unwrap();
        assert_eq!(half.x, XCoord::Q(ratio(1, 73)));
        let real = invariant_value_set(&s, &a, Place::Real, 1).unwrap();
        assert_eq!(real.values, BTreeSet::from([Invariant::Zero]));
        assert_eq!(real.provenance, Provenance::Proven(ProofRule::A));
        let five = invariant_value_set(&s, &a, Place::Finite(5), 3).unwrap();
        assert_eq!(five.provenance, Provenance::Proven(ProofRule::B));
        let shallow = invariant_value_set(&s, &a, Place::Finite(73), 1).unwrap();
        assert_eq!(shallow.values, both());
    }

    #[test]
    fn half_witnesses_reverify() {
        let (s, a) = v0();
        let out = enumerate_invariants(&s, &a, Place::Finite(73), 2, false).unwrap();
        assert_eq!(out.values(), both());
        let XCoord::Q(x) = &out.witnesses[&Invariant::Half] else { panic!() };
        let px = s.p.eval(x);
        assert_eq!(crate::hilbert::hilbert_q(&rat(73), &px, Place::Finite(73)).unwrap(), Symbol::Plus);
        let q = a.reps[0].eval(x);
        assert_eq!(crate::hilbert::hilbert_q(&rat(73), &q, Place::Finite(73)).unwrap(), Symbol::Minus);
    }

    #[test]
    fn rules_agree_with_enumeration_small_primes() {
        let (s, a) = v0();
        for p in primes_upto(30) {
            let place = Place::Finite(p);
            assert!(prove_invariant_zero(&s, place).unwrap().is_some());
            let out = enumerate_invariants(&s, &a, place, 2, false).unwrap();
            assert_eq!(out.values(), BTreeSet::from([Invariant::Zero]), "p={p}");
        }
    }

    #[test]
    fn ext_value_sets() {
        let (s, a) = v0();
        let k = QuadField::new(3).unwrap();
        for idx in [1, 2] {
            let w = ExtPlace::split(k, 73, idx).unwrap();
            let prof = ext_invariant_value_set(&s, &a, &w, 3).unwrap();
            assert_eq!(prof.values, both());
            assert!(matches!(prof.provenance, Provenance::SplitReduction { .. }));
        }
        let ram = ExtPlace::above(k, Place::Finite(3))[0];
        let prof = ext_invariant_value_set(&s, &a, &ram, 3).unwrap();
        assert_eq!(prof.provenance, Provenance::Proven(ProofRule::B));
        for w in [ram, ExtPlace::above(k, Place::Finite(5))[0], ExtPlace::above(k, Place::Finite(7))[0]] {
            let out = enumerate_ext(&s, &a, &w, 2, false).unwrap();
            assert_eq!(out.values(), BTreeSet::from([Invariant::Zero]), "{}", w.label());
            assert!(out.points > 0);
        }
        for w in ExtPlace::above(k, Place::Real) {
            let out = enumerate_ext(&s, &a, &w, 1, false).unwrap();
            assert_eq!(out.values(), BTreeSet::from([Invariant::Zero]));
        }
    }

    #[test]
    fn ext_enumeration_at_split_places_matches_q() {
        let (s, a) = v0();
        let k = QuadField::new(3).unwrap();
        for idx in [1, 2] {
            let w = ExtPlace::split(k, 73, idx).unwrap();
            let out = enumerate_ext(&s, &a, &w, 1, true).unwrap();
            assert_eq!(out.values(), both());
        }
    }

    #[test]
    fn profiles_are_ordered_and_complete() {
        let (s, a) = v0();
        let prof = profile_over_q(&s, &a, 30, 2).unwrap();
        let labels: Vec<_> = prof.iter().map(|p| p.place.clone()).collect();
        assert_eq!(labels[0], "real");
        assert_eq!(labels.last().unwrap(), "73");
        for p in &prof {
            let expect = if p.place == "73" { both() } else { BTreeSet::from([Invariant::Zero]) };
            assert_eq!(p.values, expect, "{}", p.place);
        }
        let ext = profile_over_ext(&s, &a, QuadField::new(3).unwrap(), 30, 2).unwrap();
        assert!(ext.iter().any(|p| p.place == "73+"));
        assert!(ext.iter().any(|p| p.place == "5i"));
        assert!(ext.iter().any(|p| p.place == "real-"));
    }
}
