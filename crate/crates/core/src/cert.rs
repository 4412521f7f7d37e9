//! Machine-readable certificates and their JSON / text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chatelet::profile::{PlaceProfile, Provenance};
use crate::chatelet::WaFailureCertificate;
use crate::config::Format;
use crate::error::{Error, Result};
use crate::hilbert::Invariant;
use crate::rational::format_rational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Proved,
    Enumerated,
    CitedAssumption,
    Inconclusive,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Enumerated => "enumerated",
            Status::CitedAssumption => "cited-assumption",
            Status::Inconclusive => "inconclusive",
            Status::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub place: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariants: Option<Vec<Invariant>>,
    pub claim: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub witnesses: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Entry {
    pub fn new(claim: impl Into<String>, status: Status) -> Self {
        Self {
            place: None,
            invariants: None,
            claim: claim.into(),
            status,
            depth: None,
            witnesses: BTreeMap::new(),
            detail: String::new(),
            source: None,
        }
    }

    /// `proved` when `ok`, else `failed`.
    pub fn check(claim: impl Into<String>, ok: bool) -> Self {
        Self::new(claim, if ok { Status::Proved } else { Status::Failed })
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    pub fn witness(mut self, k: impl Into<String>, v: impl ToString) -> Self {
        self.witnesses.insert(k.into(), v.to_string());
        self
    }

    pub fn depth(mut self, d: u64) -> Self {
        self.depth = Some(d);
        self
    }

    pub fn place(mut self, p: impl Into<String>) -> Self {
        self.place = Some(p.into());
        self
    }

    pub fn source(mut self, s: impl Into<String>) -> Self {
        self.source = Some(s.into());
        self
    }

    /// Downgrades a passing entry to `failed` unless `ok`.
    pub fn require(mut self, ok: bool) -> Self {
        if !ok {
            self.status = Status::Failed;
        }
        self
    }

    fn with_provenance(claim: &str, prov: &Provenance) -> Self {
        let (status, depth, detail) = match prov {
            Provenance::Proven(rule) => (Status::Proved, None, format!("{}: {}", rule.name(), rule.statement())),
            Provenance::Enumerated { depth, points } => {
                (Status::Enumerated, Some(*depth as u64), format!("{points} local points sampled"))
            }
            Provenance::SplitReduction { depth, points } => (
                Status::Enumerated,
                Some(*depth as u64),
                format!("split-reduction to the base prime; {points} local points sampled"),
            ),
        };
        let mut e = Entry::new(claim, status).detail(detail);
        e.depth = depth;
        e
    }

    pub fn from_profile(claim: &str, p: &PlaceProfile) -> Self {
        let mut e = Self::with_provenance(claim, &p.provenance).place(p.place.clone());
        e.invariants = Some(p.values.iter().copied().collect());
        for w in &p.witnesses {
            e.witnesses.insert(format!("x[{}]", w.invariant), w.x.to_string());
        }
        e
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    pub version: String,
    pub verdict: Verdict,
    pub inputs: BTreeMap<String, String>,
    pub results: Vec<Entry>,
}

impl Certificate {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            version: VERSION.into(),
            verdict: Verdict::Pass,
            inputs: BTreeMap::new(),
            results: Vec::new(),
        }
    }

    pub fn input(mut self, k: impl Into<String>, v: impl ToString) -> Self {
        self.inputs.insert(k.into(), v.to_string());
        self
    }

    pub fn push(&mut self, e: Entry) {
        self.results.push(e);
    }

    /// Sets the verdict from the entries: any failure fails, any
    /// inconclusive entry makes the whole certificate inconclusive.
    pub fn finish(mut self) -> Self {
        let statuses: Vec<Status> = self.results.iter().map(|e| e.status).collect();
        self.verdict = if statuses.contains(&Status::Failed) {
            Verdict::Fail
        } else if statuses.contains(&Status::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        self
    }

    pub fn failures(&self) -> Vec<&Entry> {
        self.results.iter().filter(|e| e.status == Status::Failed).collect()
    }

    pub fn find(&self, claim: &str) -> Option<&Entry> {
        self.results.iter().find(|e| e.claim == claim)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (version {}): {:?}", self.kind, self.version, self.verdict);
        for (k, v) in &self.inputs {
            let _ = writeln!(out, "  {k} = {v}");
        }
        let widths = self.results.iter().fold((6, 5, 5), |w, e| {
            (
                w.0.max(e.status.as_str().len()),
                w.1.max(e.claim.len()),
                w.2.max(e.place.as_deref().unwrap_or("-").len()),
            )
        });
        let _ = writeln!(out, "{:<a$}  {:<b$}  {:<c$}  invariants  detail", "status", "claim", "place", a = widths.0, b = widths.1, c = widths.2);
        for e in &self.results {
            let inv = e
                .invariants
                .as_ref()
                .map(|v| v.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(","))
                .unwrap_or_else(|| "-".into());
            let mut detail = e.detail.clone();
            if !e.witnesses.is_empty() {
                let w: Vec<String> = e.witnesses.iter().map(|(k, v)| format!("{k}={v}")).collect();
                detail = format!("{detail} [{}]", w.join(", ")).trim().to_string();
            }
            let _ = writeln!(
                out,
                "{:<a$}  {:<b$}  {:<c$}  {:<10}  {}",
                e.status.as_str(),
                e.claim,
                e.place.as_deref().unwrap_or("-"),
                inv,
                detail,
                a = widths.0,
                b = widths.1,
                c = widths.2
            );
        }
        out
    }

    /// Flattens a weak-approximation certificate: the two pinned places, the
    /// places forced to zero, the rule families, and the recomputed sum.
    pub fn from_wa(c: &WaFailureCertificate) -> Self {
        let off: Vec<String> = c.off.iter().map(|w| w.label()).collect();
        let mut out = Certificate::new("wa-failure")
            .input("d", c.field.d())
            .input("p1", c.p1)
            .input("p2", c.p2)
            .input("off", off.join(","))
            .input("prime-bound", c.prime_bound)
            .input("surface", c.surface.equation());
        for pin in [&c.w0, &c.w1] {
            let mut e = Entry::with_provenance("pinned-invariant", &pin.provenance)
                .place(pin.place.label())
                .witness("x", format_rational(&pin.x));
            e.invariants = Some(vec![pin.invariant]);
            out.push(e);
        }
        for z in &c.zero_places {
            let mut e = Entry::new("invariant-zero", Status::Proved)
                .place(z.place.label())
                .detail(format!("{}: {}", z.rule.name(), z.rule.statement()))
                .witness("x", "0/1");
            e.invariants = Some(vec![Invariant::Zero]);
            out.push(e);
        }
        for f in &c.families {
            out.push(Entry::new("invariant-zero-family", Status::Proved).detail(format!("{}: {}", f.rule.name(), f.scope)));
        }
        let sum = c.recompute_sum();
        out.push(
            Entry::check("adelic-sum", matches!(sum, Ok(Invariant::Half)) && c.sum == Invariant::Half)
                .witness("sum", sum.map(|s| s.to_string()).unwrap_or_else(|e| e.to_string()))
                .detail("sum of local invariants at the chosen adelic point; nonzero, so no global point lies in its neighbourhood"),
        );
        out.finish()
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}
