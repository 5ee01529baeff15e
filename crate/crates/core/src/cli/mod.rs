//! The `genus-equiv` command-line front end.
//!
//! Exit codes: 0 success; 1 usage, parse or precondition errors; 2 forms
//! not locally equivalent (or not in the same genus); 3 rational
//! equivalence refuted or search inconclusive; 4 verification failed;
//! 5 internal failure.

pub mod json;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::exact::{PrimeSet, RationalMatrix};
use crate::pipeline::{compute_constants, solve, verify, verify_search_set, SolveOptions};
use crate::quadform::{rational_equiv_search, same_genus, QuadraticForm, SearchPolicy};
use json::{parse_input, parse_prime_list, prime_set, InputDoc};

#[derive(Parser, Debug)]
#[command(name = "genus-equiv", version, about = "Explicit equivalences between rational quadratic forms in the same genus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct tau_hat with tau_hat' F tau_hat = G and denominators prime to P.
    Solve(SolveArgs),
    /// Check a certificate exactly.
    Verify(VerifyArgs),
    /// Print the avoidance constants for the input.
    Constants(SolveArgs),
    /// Compare F and G at the real place and at every relevant prime.
    GenusCheck(CommonArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Input JSON document, or "-" for standard input.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated primes; overrides "primes" in the input.
    #[arg(long)]
    primes: Option<String>,
    /// Write output here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Height cap for the rational equivalence search.
    #[arg(long, value_name = "Q", conflicts_with = "masser")]
    max_height: Option<u64>,
    /// Search up to the certified height bound instead of a practical cap.
    #[arg(long)]
    masser: bool,
    /// Starting p-adic precision at every prime.
    #[arg(long, value_name = "N")]
    precision: Option<u32>,
    /// Include intermediate values in the output.
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Certificate JSON; defaults to the input document itself.
    #[arg(long)]
    certificate: Option<PathBuf>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotLocallyEquivalent(_) => 2,
            Error::NotRationallyEquivalent { .. } | Error::Inconclusive { .. } => 3,
            Error::Internal(_) | Error::PrecisionExhausted => 5,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_source(path: &PathBuf) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("reading standard input: {e}")))?;
        Ok(text)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))
    }
}

fn load(common: &CommonArgs) -> Result<(InputDoc, QuadraticForm, QuadraticForm, PrimeSet), Failure> {
    let doc = parse_input(&read_source(&common.input)?).map_err(Failure::usage)?;
    let f = QuadraticForm::new(doc.f.clone()).map_err(|e| Failure::usage(format!("F: {e}")))?;
    let g = QuadraticForm::new(doc.g.clone()).map_err(|e| Failure::usage(format!("G: {e}")))?;
    let primes = match &common.primes {
        Some(list) => parse_prime_list(list).map_err(Failure::usage)?,
        None => doc.primes.clone().unwrap_or_default(),
    };
    let primes = prime_set(primes).map_err(Failure::usage)?;
    Ok((doc, f, g, primes))
}

fn emit(value: &impl Serialize, target: &Option<PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    match target {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("writing {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("writing output: {e}"))),
    }
}

fn policy(args: &SolveArgs) -> SearchPolicy {
    match (args.masser, args.max_height) {
        (true, _) => SearchPolicy::Masser,
        (false, Some(h)) => SearchPolicy::MaxHeight(h),
        (false, None) => SearchPolicy::default(),
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Solve(args) => {
            let (doc, f, g, primes) = load(&args.common)?;
            let options = SolveOptions {
                sigma: doc.sigma,
                big_sigma: doc.big_sigma,
                search: policy(&args),
                precision: args.precision,
                trace: args.trace,
            };
            let cert = solve(&f, &g, &primes, &options)?;
            emit(&cert, &args.common.output, out)?;
            Ok(0)
        }
        Command::Constants(args) => {
            let (doc, f, g, primes) = load(&args.common)?;
            let sigma = match doc.sigma {
                Some(s) => s,
                None => rational_equiv_search(&f, &g, &policy(&args))?,
            };
            let big_sigma = doc.big_sigma.unwrap_or_else(|| f.diagonalizer().clone());
            let constants = compute_constants(&f, &sigma, &big_sigma, &primes)?;
            emit(&constants, &args.common.output, out)?;
            Ok(0)
        }
        Command::Verify(args) => {
            let (doc, f, g, primes) = load(&args.common)?;
            let cert = match &args.certificate {
                Some(path) => parse_input(&read_source(path)?).map_err(Failure::usage)?,
                None => doc,
            };
            let tau_hat = cert
                .tau_hat
                .clone()
                .ok_or_else(|| Failure::usage("certificate has no tau_hat"))?;
            let mut report = verify(&f, &g, &primes, &tau_hat)?;
            if let (Some(u), Some(sigma), Some(big), Some(signs)) =
                (&cert.u, &cert.sigma, &cert.big_sigma, &cert.tau_signs)
            {
                report
                    .checks
                    .extend(verify_search_set(&f, &primes, sigma, big, signs, u, &tau_hat)?);
            }
            let passed = report.passed();
            emit(&json!({"passed": passed, "checks": report.checks}), &args.common.output, out)?;
            Ok(if passed { 0 } else { 4 })
        }
        Command::GenusCheck(args) => {
            let (_, f, g, primes) = load(&args)?;
            let report = same_genus(&f, &g, &primes)?;
            let places: Vec<_> = report
                .places
                .iter()
                .map(|s| json!({"place": s.place.to_string(), "equivalent": s.equivalent}))
                .collect();
            let same = report.same_genus();
            emit(&json!({"same_genus": same, "places": places}), &args.output, out)?;
            match report.first_failure() {
                None => Ok(0),
                Some(place) => Err(Failure {
                    code: 2,
                    message: format!("forms differ at {place}"),
                }),
            }
        }
    }
}

/// Serializes a matrix the way certificates do.
pub fn matrix_json(m: &RationalMatrix) -> serde_json::Value {
    json!(crate::pipeline::matrix_strings(m))
}
