//! Certificates that `V0` over `Q(√d)` fails weak approximation off a finite
//! set of places avoiding `p1`.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::profile::{ext_invariant_value_set, prove_invariant_zero_ext, ProofRule, Provenance, XCoord};
use super::{build_v0, BrauerClass, ChateletSurface};
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_ext, Invariant};
use crate::local::{splitting_type, ExtPlace, Place, QuadField, SplittingType};
use crate::rational::{primes_upto, rat, Rational};

/// A place with a chosen local point (by its `x`-coordinate) and the
/// invariant `A` takes there.
#[derive(Debug, Clone, PartialEq)]
pub struct PinnedPlace {
    pub place: ExtPlace,
    pub x: Rational,
    pub invariant: Invariant,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPlace {
    pub place: ExtPlace,
    pub rule: ProofRule,
}

/// A proof rule and the (infinite) family of places it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyRule {
    pub rule: ProofRule,
    pub scope: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaFailureCertificate {
    pub field: QuadField,
    pub p1: u64,
    pub p2: u64,
    pub surface: ChateletSurface,
    pub class: BrauerClass,
    pub off: Vec<ExtPlace>,
    pub w0: PinnedPlace,
    pub w1: PinnedPlace,
    pub zero_places: Vec<ZeroPlace>,
    pub families: Vec<FamilyRule>,
    pub prime_bound: u64,
    pub sum: Invariant,
}

/// Invariant of `A` at the point above a rational `x` of `V(L_w)`, evaluated
/// from scratch over `L_w`.
pub fn ext_invariant_from_witness(
    v: &ChateletSurface,
    a: &BrauerClass,
    w: &ExtPlace,
    x: &Rational,
) -> Result<Invariant> {
    let lift = |r: &Rational| w.field.from_rational(r.clone());
    let px = v.p.eval(x);
    if !px.is_zero() && hilbert_ext(&lift(&v.a), &lift(&px), w)?.invariant() != Invariant::Zero {
        return Err(Error::NotLocalPoint(x.clone()));
    }
    let (_, q) = a.rep_at(x)?;
    Ok(hilbert_ext(&lift(&a.a), &lift(&q), w)?.invariant())
}

fn pinned(
    v: &ChateletSurface,
    a: &BrauerClass,
    w: ExtPlace,
    want: Invariant,
    depth: u32,
) -> Result<PinnedPlace> {
    let prof = ext_invariant_value_set(v, a, &w, depth)?;
    let wit = prof.witnesses.iter().find(|x| x.invariant == want).ok_or_else(|| {
        Error::Precondition(format!(
            "no point with invariant {want} at {} up to depth {depth}",
            w.label()
        ))
    })?;
    let XCoord::Q(x) = &wit.x else {
        return Err(Error::Precondition(format!("non-rational witness at {}", w.label())));
    };
    Ok(PinnedPlace { place: w, x: x.clone(), invariant: want, provenance: prof.provenance })
}

pub fn wa_failure_certificate(
    field: QuadField,
    p1: u64,
    p2: u64,
    off: &[ExtPlace],
    depth: u32,
    prime_bound: u64,
) -> Result<WaFailureCertificate> {
    if splitting_type(field, p1) != SplittingType::Split {
        return Err(Error::Precondition(format!("{p1} does not split in Q(√{})", field.d())));
    }
    if let Some(w) = off.iter().find(|w| w.base == Place::Finite(p1)) {
        return Err(Error::BadPlace {
            place: w.label(),
            reason: format!("the excluded set may not contain a place over {p1}"),
        });
    }
    let (v, a) = build_v0(p1, p2)?;
    let w0 = pinned(&v, &a, ExtPlace::split(field, p1, 1)?, Invariant::Half, depth)?;
    let w1 = pinned(&v, &a, ExtPlace::split(field, p1, 2)?, Invariant::Zero, depth)?;

    let mut bases: BTreeSet<Place> = primes_upto(prime_bound).into_iter().map(Place::Finite).collect();
    bases.insert(Place::Real);
    bases.insert(Place::Finite(p2));
    bases.extend(off.iter().map(|w| w.base));
    bases.remove(&Place::Finite(p1));
    let mut zero_places = Vec::new();
    for b in bases {
        for w in ExtPlace::above(field, b) {
            let rule = prove_invariant_zero_ext(&v, &w)?.ok_or_else(|| {
                Error::Precondition(format!("no vanishing rule at {}", w.label()))
            })?;
            zero_places.push(ZeroPlace { place: w, rule });
        }
    }
    let families = vec![
        FamilyRule { rule: ProofRule::A, scope: "every archimedean place and every place over 2".into() },
        FamilyRule { rule: ProofRule::B, scope: format!("every odd finite place not over {p1}") },
        FamilyRule { rule: ProofRule::SplitReduction, scope: format!("the two places over {p1}") },
    ];
    let mut cert = WaFailureCertificate {
        field,
        p1,
        p2,
        surface: v,
        class: a,
        off: off.to_vec(),
        w0,
        w1,
        zero_places,
        families,
        prime_bound,
        sum: Invariant::Zero,
    };
    cert.sum = cert.recompute_sum()?;
    if cert.sum != Invariant::Half {
        return Err(Error::Precondition("adelic invariant sum is not 1/2".into()));
    }
    Ok(cert)
}

impl WaFailureCertificate {
    /// Sum of the invariants at the pinned points `w0`, `w1` and at `x = 0`
    /// on every listed zero place, each evaluated again from its witness.
    pub fn recompute_sum(&self) -> Result<Invariant> {
        let (v, a) = (&self.surface, &self.class);
        let mut sum = Invariant::Zero;
        for pin in [&self.w0, &self.w1] {
            let inv = ext_invariant_from_witness(v, a, &pin.place, &pin.x)?;
            if inv != pin.invariant {
                return Err(Error::Precondition(format!("witness at {} disagrees", pin.place)));
            }
            sum = sum + inv;
        }
        for z in &self.zero_places {
            // the rational point (0, 1/p1, 0) lies on every V0(L_w)
            sum = sum + ext_invariant_from_witness(v, a, &z.place, &rat(0))?;
        }
        Ok(sum)
    }
}
