//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Criterion 9 asks for `E(Q)_tors = {O}` on `y^2 = x^3 - 432`, which is false:
//! `(12, ±36)` are rational 3-torsion points. That criterion is reported as FAIL
//! and is the only failure this gate tolerates.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chatelet::bundle::{
    branch_disjointness, branch_locus, build_section, ec_point_check, ec_torsion, gamma_branch_poly, gamma_eval,
    rational_point_search, EllipticCurveQ, ExtPoint, P1Point,
};
use chatelet::arith::factor::poly_factor_rational;
use chatelet::arith::poly::{poly_discriminant, Poly};
use chatelet::bundle::elliptic::EcPoint;
use chatelet::cert::{Certificate, Status, Verdict};
use chatelet::chatelet::profile::{enumerate_ext, enumerate_invariants, profile_over_ext, profile_over_q, Provenance, XCoord};
use chatelet::chatelet::{build_v0, find_prime_pair, wa_failure_certificate, DEFAULT_SCAN_BOUND};
use chatelet::hilbert::{hilbert_ext, hilbert_q, hilbert_tame_ext, product_formula_check, Invariant, Symbol};
use chatelet::local::{split_square_class_representative, splitting_type, ExtPlace, ExtPlaceKind, Place, QuadField, SplittingType};
use chatelet::rational::{is_prime, pow_p, primes_upto, rat, ratio, split_valuation, valuation, Rational};

const TOLERATED: &[u32] = &[9];

type Outcome = std::result::Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Duration, limit_secs: u64) -> std::result::Result<(), String> {
    ensure(t < Duration::from_secs(limit_secs), format!("took {:.2}s, limit {limit_secs}s", t.as_secs_f64()))
}

fn q3() -> QuadField {
    QuadField::new(3).unwrap()
}

/// Primitive `(x, y, z)` with `a x^2 + b y^2 = z^2 mod p^k`, by lifting
/// solutions one digit at a time.
fn conic_solvable_mod(a: i64, b: i64, p: i64, k: u32) -> bool {
    fn lift(a: i128, b: i128, p: i128, level: u32, k: u32, s: (i128, i128, i128)) -> bool {
        if level == k {
            return true;
        }
        let (q, m) = (p.pow(level), p.pow(level + 1));
        for dx in 0..p {
            for dy in 0..p {
                for dz in 0..p {
                    let (x, y, z) = (s.0 + q * dx, s.1 + q * dy, s.2 + q * dz);
                    if (a * x * x + b * y * y - z * z).rem_euclid(m) == 0 && lift(a, b, p, level + 1, k, (x, y, z)) {
                        return true;
                    }
                }
            }
        }
        false
    }
    let (a, b, p) = (a as i128, b as i128, p as i128);
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                if (x, y, z) != (0, 0, 0) && (a * x * x + b * y * y - z * z).rem_euclid(p) == 0 && lift(a, b, p, 1, k, (x, y, z)) {
                    return true;
                }
            }
        }
    }
    false
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let vals = [1i64, -1, 2, -2, 3, -3, 5, -5, 7, -7, 10, -10];
    let places = [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(7), Place::Finite(73)];
    let mut checked = 0;
    let mut bad = Vec::new();
    for &a in &vals {
        for &b in &vals {
            for &v in &places {
                let got = hilbert_q(&rat(a), &rat(b), v).map_err(|e| e.to_string())?;
                let want = match v {
                    Place::Real => !(a < 0 && b < 0),
                    Place::Finite(2) => conic_solvable_mod(a, b, 2, 8),
                    Place::Finite(p) => conic_solvable_mod(a, b, p as i64, 4),
                };
                checked += 1;
                if (got == Symbol::Plus) != want {
                    bad.push(format!("({a},{b})_{}", v.label()));
                }
            }
        }
    }
    ensure(bad.is_empty(), format!("disagreements: {}", bad.join(" ")))?;
    within(start.elapsed(), 10)?;
    Ok(format!("{checked} symbols agree with conic solvability mod p^4 / 2^8"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let n = rng.gen_range(-10_000i64..=10_000);
        if n != 0 {
            return ratio(n, rng.gen_range(1..=10_000));
        }
    }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
        let (ok, _) = product_formula_check(&a, &b).map_err(|e| e.to_string())?;
        ensure(ok, format!("product formula fails for ({a}, {b})"))?;
    }
    within(start.elapsed(), 5)?;
    Ok("1000 random pairs of height <= 10^4 satisfy the product formula".into())
}

fn odd_ext_places(field: QuadField) -> Vec<ExtPlace> {
    [3u64, 5, 7, 11, 13, 73]
        .into_iter()
        .flat_map(|p| ExtPlace::above(field, Place::Finite(p)))
        .collect()
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = 0;
    // over Q
    for p in [3u64, 5, 7, 11, 13, 73, 97] {
        for _ in 0..200 {
            let clean = |x: &Rational| split_valuation(x, p).1;
            let (u, w) = (random_rational(&mut rng), random_rational(&mut rng));
            let (i, j) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            let a = clean(&u) * pow_p(p, 2 * i);
            let b = clean(&w) * pow_p(p, 2 * j);
            ensure(hilbert_q(&a, &b, Place::Finite(p)).unwrap() == Symbol::Plus, format!("even lemma: ({a},{b})_{p}"))?;
            let c = random_rational(&mut rng);
            let c = &c * pow_p(p, valuation(&b, p).unwrap() - valuation(&c, p).unwrap() + rng.gen_range(1..4));
            let lhs = hilbert_q(&u, &(&b + &c), Place::Finite(p)).unwrap();
            ensure(lhs == hilbert_q(&u, &b, Place::Finite(p)).unwrap(), format!("(a,b+c) lemma at {p}"))?;
            cases += 2;
        }
    }
    // over Q(√3), at every odd place above 3, 5, 7, 11, 13, 73
    let k = q3();
    for w in odd_ext_places(k) {
        let pi = if w.kind == ExtPlaceKind::Ramified { k.sqrt_d() } else { k.from_rational(rat(w.base.prime().unwrap() as i64)) };
        let unit = |rng: &mut ChaCha8Rng| loop {
            let x = k.elem(rat(rng.gen_range(-50..=50)), rat(rng.gen_range(-50..=50)));
            if !x.is_zero() && chatelet::local::ext_valuation(&x, &w).unwrap() == 0 {
                return x;
            }
        };
        for _ in 0..50 {
            let e = |rng: &mut ChaCha8Rng| 2 * rng.gen_range(-2i64..=2);
            let a = &unit(&mut rng) * &pi.pow(e(&mut rng)).unwrap();
            let b = &unit(&mut rng) * &pi.pow(e(&mut rng)).unwrap();
            ensure(hilbert_ext(&a, &b, &w).unwrap() == Symbol::Plus, format!("even lemma at {}", w.label()))?;
            let c = &unit(&mut rng) * &pi.pow(rng.gen_range(1..4)).unwrap();
            let bb = unit(&mut rng);
            let lhs = hilbert_ext(&a, &(&bb + &c), &w).unwrap();
            ensure(lhs == hilbert_ext(&a, &bb, &w).unwrap(), format!("(a,b+c) lemma at {}", w.label()))?;
            cases += 2;
        }
    }
    let ps: Vec<u64> = primes_upto(10_000).into_iter().filter(|p| p % 8 == 1).collect();
    for &p in &ps {
        ensure(hilbert_q(&rat(p as i64), &rat(-1), Place::Finite(p)).unwrap() == Symbol::Plus, format!("(p,-1)_p at {p}"))?;
    }
    Ok(format!("{cases} lemma instances and (p,-1)_p = +1 for all {} primes p = 1 mod 8 below 10^4", ps.len()))
}

/// Independent scan: `d` a square mod `p1` by brute force, `p2` a non-square.
fn brute_pair(d: i64) -> (u64, u64) {
    let is_sq = |a: i64, p: u64| (0..p).any(|x| (x * x) % p == a.rem_euclid(p as i64) as u64);
    let p1 = (2..).find(|&p| p % 8 == 1 && is_prime(p) && d.rem_euclid(p as i64) != 0 && is_sq(d, p)).unwrap();
    let p2 = (2..).find(|&p| is_prime(p) && p != p1 && !is_sq(p as i64, p1)).unwrap();
    (p1, p2)
}

fn criterion_4() -> Outcome {
    let none = BTreeSet::new();
    let mut out = Vec::new();
    for (d, want) in [(3i64, (73u64, 5u64)), (2, (17, 3)), (5, (41, 3))] {
        let got = find_prime_pair(QuadField::new(d).unwrap(), &none, DEFAULT_SCAN_BOUND).map_err(|e| e.to_string())?;
        ensure(got == want && brute_pair(d) == want, format!("d={d}: got {got:?}, scan {:?}", brute_pair(d)))?;
        out.push(format!("d={d}: {got:?}"));
    }
    Ok(out.join(", "))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (v, a) = build_v0(73, 5).map_err(|e| e.to_string())?;
    let profile = profile_over_q(&v, &a, 200, 4).map_err(|e| e.to_string())?;
    let zero = BTreeSet::from([Invariant::Zero]);
    let mut places = 0;
    for p in &profile {
        let place = Place::parse(&p.place).map_err(|e| e.to_string())?;
        if place == Place::Finite(73) {
            ensure(p.values == BTreeSet::from([Invariant::Zero, Invariant::Half]), "73 must give {0, 1/2}")?;
            let half = p.witnesses.iter().find(|w| w.invariant == Invariant::Half).ok_or("no 1/2 witness")?;
            let XCoord::Q(x) = &half.x else { return Err("1/2 witness is not rational".into()) };
            ensure(valuation(x, 73).is_some_and(|j| j <= -1), format!("1/2 witness {x} is not at 1/73 or deeper"))?;
        } else {
            ensure(p.values == zero, format!("{} gives {:?}", p.place, p.values))?;
            ensure(matches!(p.provenance, Provenance::Proven(_)), format!("{} not covered by a proof rule", p.place))?;
            let sampled = enumerate_invariants(&v, &a, place, 4, false).map_err(|e| e.to_string())?;
            ensure(sampled.values() == zero, format!("depth-4 sampling at {} gives {:?}", p.place, sampled.values()))?;
        }
        places += 1;
    }
    ensure(profile.iter().any(|p| p.place == "real") && profile.iter().any(|p| p.place == "2"), "real and 2 missing")?;
    within(start.elapsed(), 30)?;
    Ok(format!("{places} places: {{0, 1/2}} at 73, {{0}} elsewhere by rule and by depth-4 sampling"))
}

fn criterion_6() -> Outcome {
    let k = q3();
    let (v, a) = build_v0(73, 5).map_err(|e| e.to_string())?;
    let profile = profile_over_ext(&v, &a, k, 200, 4).map_err(|e| e.to_string())?;
    let both = BTreeSet::from([Invariant::Zero, Invariant::Half]);
    let zero = BTreeSet::from([Invariant::Zero]);
    for p in &profile {
        let want = if p.place == "73+" || p.place == "73-" { &both } else { &zero };
        ensure(p.values == *want, format!("{} gives {:?}", p.place, p.values))?;
    }
    let kinds: BTreeSet<&str> = profile
        .iter()
        .map(|p| match ExtPlace::parse(k, &p.place).unwrap().kind {
            ExtPlaceKind::Split(_) => "split",
            ExtPlaceKind::Inert => "inert",
            ExtPlaceKind::Ramified => "ramified",
            _ => "archimedean",
        })
        .collect();
    ensure(kinds.len() == 4, format!("place kinds covered: {kinds:?}"))?;
    // tame symbols at split places against the symbols over Q_p
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let split: Vec<u64> = primes_upto(200).into_iter().filter(|&p| p > 2 && splitting_type(k, p) == SplittingType::Split).collect();
    let (mut pairs, mut points) = (0, 0);
    for &p in &split {
        for idx in 1..=2u8 {
            let w = ExtPlace::split(k, p, idx).map_err(|e| e.to_string())?;
            for _ in 0..100 {
                let (x, y) = (random_rational(&mut rng), random_rational(&mut rng));
                let tame = hilbert_tame_ext(&k.from_rational(x.clone()), &k.from_rational(y.clone()), &w).unwrap();
                ensure(tame == hilbert_q(&x, &y, Place::Finite(p)).unwrap(), format!("({x},{y}) at {}", w.label()))?;
                let (x, y) = (random_elem(k, &mut rng), random_elem(k, &mut rng));
                let tame = hilbert_tame_ext(&x, &y, &w).unwrap();
                let (ix, iy) = (split_square_class_representative(&x, &w).unwrap(), split_square_class_representative(&y, &w).unwrap());
                ensure(tame == hilbert_q(&ix, &iy, Place::Finite(p)).unwrap(), format!("({x},{y}) at {}", w.label()))?;
                pairs += 2;
            }
            if p <= 37 || p == 73 {
                let over_l = enumerate_ext(&v, &a, &w, 1, p == 73).map_err(|e| e.to_string())?;
                let over_q = enumerate_invariants(&v, &a, Place::Finite(p), 1, p == 73).map_err(|e| e.to_string())?;
                ensure(over_l.values() == over_q.values(), format!("value sets differ at {}", w.label()))?;
                points += over_l.points;
            }
        }
    }
    Ok(format!(
        "{} places match; tame symbols agree with Q_p on {pairs} pairs at {} split places; value sets agree over {points} points",
        profile.len(),
        2 * split.len()
    ))
}

fn random_elem(k: QuadField, rng: &mut ChaCha8Rng) -> chatelet::local::ExtElem {
    loop {
        let x = k.elem(ratio(rng.gen_range(-999..=999), rng.gen_range(1..=999)), ratio(rng.gen_range(-999..=999), rng.gen_range(1..=999)));
        if !x.is_zero() {
            return x;
        }
    }
}

fn criterion_7() -> Outcome {
    let k = q3();
    let c = wa_failure_certificate(k, 73, 5, &[], 4, 200).map_err(|e| e.to_string())?;
    let sum = c.recompute_sum().map_err(|e| e.to_string())?;
    ensure(sum == Invariant::Half, format!("sum {sum}"))?;
    for label in ["73+", "73-"] {
        let w = ExtPlace::parse(k, label).unwrap();
        ensure(wa_failure_certificate(k, 73, 5, &[w], 4, 200).is_err(), format!("T containing {label} accepted"))?;
    }
    Ok(format!("sum = 1/2 from x = {} at {} and x = {} at {}; T over 73 rejected", c.w0.x, c.w0.place, c.w1.x, c.w1.place))
}

fn criterion_8() -> Outcome {
    let p_inf = &Poly::from_ints(&[1, 0, -1]) * &Poly::from_ints(&[-73, 0, 1]);
    let p_zero = &Poly::from_ints(&[1, 0, 5]) * &Poly::new(vec![ratio(1, 5329), rat(0), ratio(5334, 5329)]);
    let s = build_section(&p_inf, &p_zero).map_err(|e| e.to_string())?;
    let b = branch_locus(&s).map_err(|e| e.to_string())?;
    let key = |f: &Poly| f.to_string();
    let got: BTreeSet<String> = b.radical().iter().map(key).collect();
    let want: BTreeSet<String> = [
        Poly::from_ints(&[-26670, 0, 5329]),
        Poly::from_ints(&[-1, 0, 389017]),
        Poly::from_ints(&[5329, 0, 8577816, 0, 27625536]),
    ]
    .iter()
    .map(key)
    .collect();
    ensure(got == want, format!("radical factors {got:?}"))?;
    for f in b.radical() {
        ensure(poly_factor_rational(&f).unwrap().is_irreducible(), format!("{f} reducible"))?;
    }
    ensure(!poly_discriminant(&p_inf).unwrap().is_zero() && !b.contains_infinity, "(1:0) in R")?;
    let (g, g_inf) = gamma_branch_poly();
    let d = branch_disjointness(&b.radical(), b.contains_infinity, &g, g_inf).map_err(|e| e.to_string())?;
    ensure(d.disjoint && d.resultants.iter().all(|r| !r.is_zero()), "branch loci meet")?;
    Ok(format!("3 irreducible factors match; resultants {}", d.resultants.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")))
}

fn criterion_9() -> Outcome {
    let mut fails = Vec::new();
    let t16 = ec_torsion(-16).map_err(|e| e.to_string())?;
    if t16 != [EcPoint::Infinity] {
        fails.push(format!("E(Q)_tors for -16 is {t16:?}"));
    }
    let t432 = ec_torsion(-432).map_err(|e| e.to_string())?;
    if t432 != [EcPoint::Infinity] {
        let pts: Vec<String> = t432.iter().map(|p| p.to_string()).collect();
        fails.push(format!("ec_torsion(-432) = {{{}}}, not {{O}}: 12^3 - 432 = 36^2", pts.join(", ")));
    }
    if !rational_point_search(-16, 10_000, 100).is_empty() {
        fails.push("point search found an affine point on y^2 = x^3 - 16".into());
    }
    let k = q3();
    let r = |n: i64| k.from_rational(rat(n));
    let e = EllipticCurveQ::new(-16).unwrap();
    let origin = ExtPoint::new(r(0), r(1), r(0)).unwrap();
    let plus = ExtPoint::new(r(4), k.elem(rat(0), rat(4)), r(1)).unwrap();
    let minus = plus.neg();
    if ![&origin, &plus, &minus].iter().all(|p| ec_point_check(&e, p)) {
        fails.push("(4:±4√3:1) not on the curve".into());
    }
    let inf_ok = gamma_eval(&origin).ok() == Some(P1Point::infinity(k));
    let zero_ok = [&plus, &minus].iter().all(|p| gamma_eval(p).ok() == Some(P1Point::affine(k, rat(0))));
    if !(inf_ok && zero_ok) {
        fails.push("gamma images differ".into());
    }
    if fails.is_empty() {
        Ok("torsion, point search, points over L and gamma images all as expected".into())
    } else {
        Err(format!("{}; the remaining clauses hold", fails.join("; ")))
    }
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_chatelet")).arg("verify-example").output().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(out.status.code() == Some(0), format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
    within(elapsed, 60)?;
    let c = Certificate::from_json(&String::from_utf8_lossy(&out.stdout)).map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Pass, "verdict is not pass")?;
    let cited: BTreeSet<&str> = c.results.iter().filter(|e| e.status == Status::CitedAssumption).map(|e| e.claim.as_str()).collect();
    ensure(cited == BTreeSet::from(["analytic-rank-zero", "sha-finite"]), format!("cited entries {cited:?}"))?;
    let other = c
        .results
        .iter()
        .filter(|e| e.status != Status::CitedAssumption)
        .all(|e| matches!(e.status, Status::Proved | Status::Enumerated));
    ensure(other, "an entry is neither proved nor enumerated")?;
    ensure(c.results.iter().filter(|e| e.status == Status::Enumerated).all(|e| e.depth.is_some()), "enumerated entry without depth")?;
    Ok(format!("exit 0 in {:.2}s, {} entries", elapsed.as_secs_f64(), c.results.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "Hilbert symbols against conic solvability", criterion_1),
        (2, "product formula on random pairs", criterion_2),
        (3, "lemma suites", criterion_3),
        (4, "prime pairs", criterion_4),
        (5, "invariant profile over Q", criterion_5),
        (6, "invariant profile over Q(√3)", criterion_6),
        (7, "weak-approximation certificate", criterion_7),
        (8, "branch locus and disjointness", criterion_8),
        (9, "elliptic curves and gamma", criterion_9),
        (10, "verify-example", criterion_10),
    ];
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("criterion {n:>2} PASS ({secs:.2}s) {name}: {msg}"),
            Err(msg) => {
                println!("criterion {n:>2} FAIL ({secs:.2}s) {name}: {msg}");
                if !TOLERATED.contains(&n) {
                    unexpected.push(n);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
