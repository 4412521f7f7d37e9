//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 a check failed, 2 bad input, 3 inconclusive.

use std::collections::BTreeSet;

use clap::{Parser, Subcommand};

use crate::bundle::{verify_example, Tamper};
use crate::cert::{Certificate, Entry};
use crate::chatelet::profile::{profile_over_ext, profile_over_q};
use crate::chatelet::{build_v0, find_prime_pair, wa_failure_certificate, DEFAULT_SCAN_BOUND};
use crate::config::{Config, Format};
use crate::error::{Error, Result};
use crate::hilbert::{hilbert_q, hilbert_rational_ext};
use crate::local::{ExtPlace, Place, QuadField};
use crate::rational::parse_rational;

pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "chatelet", version, about = "Hilbert symbols, Brauer invariants of Chatelet surfaces, and weak-approximation certificates")]
pub struct Cli {
    /// Output format for certificates.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hilbert symbol (a, b)_v; with --field, v names a place of Q(√d).
    #[command(allow_negative_numbers = true)]
    Hilbert {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        place: String,
        #[arg(long)]
        field: Option<i64>,
    },
    /// Smallest p1 = 1 mod 8 split in Q(√d), then the smallest p2 with (p1, p2)_{p1} = -1.
    #[command(allow_negative_numbers = true)]
    FindPrimes {
        d: i64,
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<u64>,
        #[arg(long, default_value_t = DEFAULT_SCAN_BOUND)]
        scan_bound: u64,
    },
    /// Local invariant sets of A on V0(p1, p2) over Q and Q(√d).
    #[command(allow_negative_numbers = true)]
    Profile {
        d: i64,
        p1: u64,
        p2: u64,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 200)]
        primes_upto: u64,
    },
    /// Certificate that V0(p1, p2) over Q(√d) fails weak approximation off the given places.
    #[command(allow_negative_numbers = true)]
    Certificate {
        d: i64,
        p1: u64,
        p2: u64,
        /// Comma-separated places of Q(√d), e.g. `real+,5i,2r`.
        #[arg(long, value_delimiter = ',')]
        off: Vec<String>,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 200)]
        primes_upto: u64,
    },
    /// Check every computable claim of the explicit example over Q(√3).
    VerifyExample {
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 200)]
        primes_upto: u64,
        /// Negative control: replace p2 before checking.
        #[arg(long, hide = true)]
        tamper_p2: Option<u64>,
    },
}

/// Errors caused by malformed or out-of-range input rather than by a failed check.
fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_)
            | Error::BadPlace { .. }
            | Error::BadQuadField(_)
            | Error::NotPrime(_)
            | Error::ZeroArgument { .. }
            | Error::Precondition(_)
            | Error::BoundExceeded(_)
    )
}

fn certificate_output(c: &Certificate, format: Format) -> (String, i32) {
    (c.emit(format), c.verdict.exit_code())
}

fn profile(d: i64, p1: u64, p2: u64, cfg: &Config) -> Result<Certificate> {
    let field = QuadField::new(d)?;
    let (v, a) = build_v0(p1, p2)?;
    let (q, l) = rayon::join(
        || profile_over_q(&v, &a, cfg.prime_bound, cfg.depth),
        || profile_over_ext(&v, &a, field, cfg.prime_bound, cfg.depth),
    );
    let mut c = Certificate::new("invariant-profile")
        .input("d", d)
        .input("p1", p1)
        .input("p2", p2)
        .input("depth", cfg.depth)
        .input("prime-bound", cfg.prime_bound)
        .input("surface", v.equation());
    for p in q? {
        c.push(Entry::from_profile("local-invariants-q", &p));
    }
    for p in l? {
        c.push(Entry::from_profile("local-invariants-l", &p));
    }
    Ok(c.finish())
}

/// Runs a parsed command, returning the text to print and the exit code.
pub fn run(cli: &Cli) -> Result<(String, i32)> {
    let fmt = cli.format;
    match &cli.command {
        Command::Hilbert { a, b, place, field } => {
            let (a, b) = (parse_rational(a)?, parse_rational(b)?);
            let s = match field {
                None => hilbert_q(&a, &b, Place::parse(place)?)?,
                Some(d) => {
                    let field = QuadField::new(*d)?;
                    let w = ExtPlace::parse(field, place)?;
                    hilbert_rational_ext(&a, &field.from_rational(b), &w)?
                }
            };
            Ok((format!("{s}\n"), 0))
        }
        Command::FindPrimes { d, exclude, scan_bound } => {
            let excluded: BTreeSet<u64> = exclude.iter().copied().collect();
            let (p1, p2) = find_prime_pair(QuadField::new(*d)?, &excluded, *scan_bound)?;
            Ok((format!("p1={p1} p2={p2}\n"), 0))
        }
        Command::Profile { d, p1, p2, depth, primes_upto } => {
            let cfg = Config { depth: *depth, prime_bound: *primes_upto, format: fmt, ..Config::default() };
            cfg.validate()?;
            Ok(certificate_output(&profile(*d, *p1, *p2, &cfg)?, fmt))
        }
        Command::Certificate { d, p1, p2, off, depth, primes_upto } => {
            let cfg = Config { depth: *depth, prime_bound: *primes_upto, format: fmt, ..Config::default() };
            cfg.validate()?;
            let field = QuadField::new(*d)?;
            let off = off.iter().map(|s| ExtPlace::parse(field, s)).collect::<Result<Vec<_>>>()?;
            let c = wa_failure_certificate(field, *p1, *p2, &off, cfg.depth, cfg.prime_bound)?;
            Ok(certificate_output(&Certificate::from_wa(&c), fmt))
        }
        Command::VerifyExample { depth, primes_upto, tamper_p2 } => {
            let cfg = Config { depth: *depth, prime_bound: *primes_upto, format: fmt, ..Config::default() };
            let c = verify_example(&cfg, &Tamper { p2: *tamper_p2 })?;
            Ok(certificate_output(&c, fmt))
        }
    }
}

/// Parses `args` and runs; returns stdout, stderr and the exit code.
pub fn dispatch<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if e.use_stderr() { (String::new(), text, code) } else { (text, String::new(), code) };
        }
    };
    match run(&cli) {
        Ok((out, code)) => (out, String::new(), code),
        Err(e) => {
            let code = if is_usage(&e) { EXIT_USAGE } else { 1 };
            (String::new(), format!("error: {e}\n"), code)
        }
    }
}
