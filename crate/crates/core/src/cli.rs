//! Command-line front end. Every subcommand prints one JSON document with
//! exact string-encoded numbers (floats appear only in fields named
//! `float_*`) and exits 0 on success, 1 on a failed check or infeasible
//! verdict, 2 on error. Identical inputs produce byte-identical output.

use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::{
    certify, certify_at, lambda_search, refine_window, structure_checks, CertificateDocument,
};
use crate::error::{Error, Result};
use crate::exactnum::{rat_from_str, rat_to_string, Rational};
use crate::families::{
    brute_force_max, hyperplane_family, point_star, primal_check, slackness_check, PrimalReport,
    SearchResult, SlacknessReport,
};
use crate::lattice::{
    spectrum_crosscheck, verify_identities, verify_lemmas, LatticeReport, SpectrumReport,
    SubspaceLattice, DEFAULT_MAX_ENTRIES,
};
use crate::spectrum::{multiplicities, theta, Parameters, Theta};

#[derive(Parser)]
#[command(
    name = "qcross",
    version,
    about = "Exact dual certificates for the maximum size product of \
             cross-intersecting subspace families"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the JSON document to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Cap on dense matrix entries for lattice computations; falls back to
    /// the QCROSS_MAX_ENTRIES environment variable, then to 50000000.
    #[arg(long, global = true)]
    pub max_entries: Option<u128>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build and verify a dual certificate for the product bound.
    Certify(CertifyArgs),
    /// Verify the incidence identities and harmonic-space lemmas on an
    /// explicit lattice, exactly.
    CheckIdentities(CheckIdentitiesArgs),
    /// Closed-form eigenvalue tables, optionally crosschecked against an
    /// explicit lattice.
    Spectrum(SpectrumArgs),
    /// Extremal constructions with primal and slackness checks.
    Extremal(ExtremalArgs),
    /// Exhaustive maximum-product search on an explicit lattice.
    Search(SearchArgs),
    /// Certify a whole parameter grid and aggregate the verdicts.
    Sweep(SweepArgs),
}

#[derive(Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub k: i64,
    #[arg(long)]
    pub l: i64,
    /// "auto" searches for a feasible multiplier; an explicit rational
    /// ("p/r" or integer) probes one point of the feasibility window.
    #[arg(long, default_value = "auto")]
    pub lambda: String,
    /// Bisect the reported feasibility bracket this many times.
    #[arg(long)]
    pub refine_bits: Option<u32>,
}

#[derive(Args)]
pub struct CheckIdentitiesArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: i64,
    /// Highest level used in the identity suite (default n).
    #[arg(long)]
    pub kmax: Option<i64>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub k: i64,
    #[arg(long)]
    pub l: i64,
    /// Also diagonalize the explicit disjointness matrices numerically.
    #[arg(long)]
    pub crosscheck: bool,
    /// Relative tolerance for the numeric crosscheck.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args)]
pub struct ExtremalArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub k: i64,
    #[arg(long)]
    pub l: i64,
    /// Multiplier for the slackness check ("auto" or a rational).
    #[arg(long, default_value = "auto")]
    pub lambda: String,
}

#[derive(Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub k: i64,
    #[arg(long)]
    pub l: i64,
    /// Time budget in seconds before the search reports a lower bound.
    #[arg(long, default_value_t = 3600)]
    pub budget: u64,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Field sizes to sweep.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,7,8,9")]
    pub qs: Vec<u64>,
    #[arg(long, default_value_t = 2)]
    pub n_min: i64,
    #[arg(long, default_value_t = 14)]
    pub n_max: i64,
    /// Also run the structural checks at the found multiplier and its half.
    #[arg(long)]
    pub structure: bool,
}

pub enum LambdaMode {
    Auto,
    Fixed(Rational),
}

pub fn parse_lambda(s: &str) -> Result<LambdaMode> {
    if s == "auto" {
        Ok(LambdaMode::Auto)
    } else {
        Ok(LambdaMode::Fixed(rat_from_str(s)?))
    }
}

fn resolve_max_entries(flag: Option<u128>) -> Result<u128> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var("QCROSS_MAX_ENTRIES") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad QCROSS_MAX_ENTRIES value {s:?}"))),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MAX_ENTRIES),
        Err(e) => Err(Error::Parse(format!("bad QCROSS_MAX_ENTRIES: {e}"))),
    }
}

fn pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serialization");
    s.push('\n');
    s
}

#[derive(Serialize)]
pub struct IdentitiesOutput {
    pub identities: LatticeReport,
    pub lemmas: LatticeReport,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct ThetaRow {
    pub i: i64,
    pub theta: Theta,
    pub square: String,
    pub rational: Option<String>,
}

#[derive(Serialize)]
pub struct SpectrumOutput {
    pub params: Parameters,
    pub theta_kk: Vec<ThetaRow>,
    pub theta_kl: Vec<ThetaRow>,
    pub theta_ll: Vec<ThetaRow>,
    pub multiplicities: Vec<String>,
    pub crosscheck: Vec<SpectrumReport>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct ConstructionReport {
    pub construction: String,
    pub f_size: u64,
    pub g_size: u64,
    pub primal: PrimalReport,
    pub slackness: SlacknessReport,
}

#[derive(Serialize)]
pub struct ExtremalOutput {
    pub params: Parameters,
    pub lambda: String,
    pub constructions: Vec<ConstructionReport>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SweepStructure {
    pub at_lambda: bool,
    pub at_half_lambda: bool,
}

#[derive(Serialize)]
pub struct SweepPoint {
    pub q: u64,
    pub n: i64,
    pub k: i64,
    pub l: i64,
    pub lambda: String,
    pub lambda_bracket: (String, String),
    pub bound: String,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<SweepStructure>,
}

#[derive(Serialize)]
pub struct SweepOutput {
    pub qs: Vec<u64>,
    pub n_min: i64,
    pub n_max: i64,
    pub structure: bool,
    pub total: u64,
    pub feasible: u64,
    pub points: Vec<SweepPoint>,
    pub pass: bool,
}

fn run_certify(args: &CertifyArgs) -> Result<(String, i32)> {
    let p = Parameters::new(args.q, args.n, args.k, args.l)?;
    let cert = match parse_lambda(&args.lambda)? {
        LambdaMode::Auto => certify(&p)?,
        LambdaMode::Fixed(l) => certify_at(&p, &l)?,
    };
    let mut doc: CertificateDocument = cert.to_document();
    if let Some(bits) = args.refine_bits {
        let refined = refine_window(&p, &cert.lambda_bracket, bits);
        doc.lambda_bracket = (rat_to_string(&refined.0), rat_to_string(&refined.1));
    }
    let code = if doc.verdict == "feasible" { 0 } else { 1 };
    Ok((pretty(&doc), code))
}

fn run_check_identities(args: &CheckIdentitiesArgs, max_entries: u128) -> Result<(String, i32)> {
    let lat = SubspaceLattice::with_guard(args.q, args.n, max_entries)?;
    let kmax = args.kmax.unwrap_or(args.n);
    let identities = verify_identities(&lat, kmax, max_entries)?;
    let lemmas = verify_lemmas(&lat, max_entries)?;
    let pass = identities.pass && lemmas.pass;
    let doc = IdentitiesOutput {
        identities,
        lemmas,
        pass,
    };
    Ok((pretty(&doc), i32::from(!pass)))
}

fn theta_rows(p: &Parameters, k: i64, l: i64, top: i64) -> Result<Vec<ThetaRow>> {
    let mut rows = Vec::with_capacity(top as usize + 1);
    for i in 0..=top {
        let th = theta(p, i, k, l)?;
        rows.push(ThetaRow {
            i,
            square: rat_to_string(&th.square()),
            rational: th.rational_value().as_ref().map(rat_to_string),
            theta: th,
        });
    }
    Ok(rows)
}

fn run_spectrum(args: &SpectrumArgs, max_entries: u128) -> Result<(String, i32)> {
    let p = Parameters::new(args.q, args.n, args.k, args.l)?;
    let (k, l) = (p.k(), p.l());
    let theta_kk = theta_rows(&p, k, k, k)?;
    let theta_kl = theta_rows(&p, k, l, l)?;
    let theta_ll = theta_rows(&p, l, l, l)?;
    let mults = multiplicities(p.q(), p.n())?;
    let mult_strings: Vec<String> = mults.iter().map(|d| d.to_string()).collect();

    let mut crosscheck = Vec::new();
    if args.crosscheck {
        let lat = SubspaceLattice::with_guard(p.q(), p.n(), max_entries)?;
        crosscheck.push(spectrum_crosscheck(&lat, k, args.tol, max_entries)?);
        if l != k {
            crosscheck.push(spectrum_crosscheck(&lat, l, args.tol, max_entries)?);
        }
    }
    let pass = crosscheck.iter().all(|r| r.pass);
    let doc = SpectrumOutput {
        params: p,
        theta_kk,
        theta_kl,
        theta_ll,
        multiplicities: mult_strings,
        crosscheck,
        pass,
    };
    Ok((pretty(&doc), i32::from(!pass)))
}

fn run_extremal(args: &ExtremalArgs, max_entries: u128) -> Result<(String, i32)> {
    let p = Parameters::new(args.q, args.n, args.k, args.l)?;
    let lat = SubspaceLattice::with_guard(p.q(), p.n(), max_entries)?;
    let lambda = match parse_lambda(&args.lambda)? {
        LambdaMode::Auto => lambda_search(&p)?.0,
        LambdaMode::Fixed(l) => l,
    };

    let mut constructions = Vec::new();
    let f = point_star(&lat, p.k())?;
    let g = point_star(&lat, p.l())?;
    constructions.push(ConstructionReport {
        construction: "point_star".to_string(),
        f_size: f.len() as u64,
        g_size: g.len() as u64,
        primal: primal_check(&p, &f, &g)?,
        slackness: slackness_check(&p, &f, &g, &lambda)?,
    });
    // Subspaces of a fixed hyperplane form the second extremal type, and
    // the pair is cross-intersecting exactly when k + l reaches n, which
    // under k, l <= n/2 forces k = l = n/2.
    if p.k() == p.l() && p.n() == 2 * p.k() {
        let h = hyperplane_family(&lat, p.k())?;
        constructions.push(ConstructionReport {
            construction: "hyperplane".to_string(),
            f_size: h.len() as u64,
            g_size: h.len() as u64,
            primal: primal_check(&p, &h, &h)?,
            slackness: slackness_check(&p, &h, &h, &lambda)?,
        });
    }

    let pass = constructions
        .iter()
        .all(|c| c.primal.pass && c.slackness.pass);
    let doc = ExtremalOutput {
        params: p,
        lambda: rat_to_string(&lambda),
        constructions,
        pass,
    };
    Ok((pretty(&doc), i32::from(!pass)))
}

fn run_search(args: &SearchArgs, max_entries: u128) -> Result<(String, i32)> {
    let p = Parameters::new(args.q, args.n, args.k, args.l)?;
    let lat = SubspaceLattice::with_guard(p.q(), p.n(), max_entries)?;
    let res: SearchResult = brute_force_max(&p, &lat, Duration::from_secs(args.budget))?;
    Ok((pretty(&res), 0))
}

fn run_sweep(args: &SweepArgs) -> Result<(String, i32)> {
    let mut grid = Vec::new();
    for &q in &args.qs {
        for n in args.n_min..=args.n_max {
            for k in 1..=n / 2 {
                for l in 1..=k {
                    grid.push((q, n, k, l));
                }
            }
        }
    }
    if grid.is_empty() {
        return Err(Error::invalid(format!(
            "empty sweep grid: qs={:?}, n in {}..={}",
            args.qs, args.n_min, args.n_max
        )));
    }

    let points: Vec<SweepPoint> = grid
        .par_iter()
        .map(|&(q, n, k, l)| -> Result<SweepPoint> {
            let p = Parameters::new(q, n, k, l)?;
            let cert = certify(&p)?;
            let structure = if args.structure {
                let lambda = &cert.coefficients.lambda;
                let half = lambda / Rational::from_integer(BigInt::from(2));
                Some(SweepStructure {
                    at_lambda: structure_checks(&p, lambda).pass,
                    at_half_lambda: structure_checks(&p, &half).pass,
                })
            } else {
                None
            };
            Ok(SweepPoint {
                q,
                n,
                k,
                l,
                lambda: rat_to_string(&cert.coefficients.lambda),
                lambda_bracket: (
                    rat_to_string(&cert.lambda_bracket.0),
                    rat_to_string(&cert.lambda_bracket.1),
                ),
                bound: cert.bound.to_string(),
                verdict: cert.verdict.as_str().to_string(),
                structure,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let total = points.len() as u64;
    let feasible = points.iter().filter(|p| p.verdict == "feasible").count() as u64;
    let structure_ok = points.iter().all(|p| match &p.structure {
        Some(s) => s.at_lambda && s.at_half_lambda,
        None => true,
    });
    let pass = feasible == total && structure_ok;
    let doc = SweepOutput {
        qs: args.qs.clone(),
        n_min: args.n_min,
        n_max: args.n_max,
        structure: args.structure,
        total,
        feasible,
        points,
        pass,
    };
    Ok((pretty(&doc), i32::from(!pass)))
}

fn execute(cli: &Cli) -> Result<(String, i32)> {
    let max_entries = resolve_max_entries(cli.max_entries)?;
    match &cli.command {
        Command::Certify(args) => run_certify(args),
        Command::CheckIdentities(args) => run_check_identities(args, max_entries),
        Command::Spectrum(args) => run_spectrum(args, max_entries),
        Command::Extremal(args) => run_extremal(args, max_entries),
        Command::Search(args) => run_search(args, max_entries),
        Command::Sweep(args) => run_sweep(args),
    }
}

fn params_echo(cmd: &Command) -> serde_json::Value {
    match cmd {
        Command::Certify(a) => {
            serde_json::json!({"q": a.q, "n": a.n, "k": a.k, "l": a.l})
        }
        Command::CheckIdentities(a) => serde_json::json!({"q": a.q, "n": a.n}),
        Command::Spectrum(a) => {
            serde_json::json!({"q": a.q, "n": a.n, "k": a.k, "l": a.l})
        }
        Command::Extremal(a) => {
            serde_json::json!({"q": a.q, "n": a.n, "k": a.k, "l": a.l})
        }
        Command::Search(a) => {
            serde_json::json!({"q": a.q, "n": a.n, "k": a.k, "l": a.l})
        }
        Command::Sweep(a) => {
            serde_json::json!({"qs": a.qs, "n_min": a.n_min, "n_max": a.n_max})
        }
    }
}

/// Run the parsed command and return the document plus exit code; errors
/// become a JSON error object with exit code 2.
pub fn dispatch(cli: &Cli) -> (String, i32) {
    match execute(cli) {
        Ok(pair) => pair,
        Err(e) => {
            let doc = serde_json::json!({
                "error": e.code(),
                "message": e.to_string(),
                "params": params_echo(&cli.command),
            });
            (pretty(&doc), 2)
        }
    }
}

fn deliver(path: &Option<PathBuf>, json: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, json),
        None => std::io::stdout().lock().write_all(json.as_bytes()),
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let (json, code) = dispatch(&cli);
    if let Err(e) = deliver(&cli.output, &json) {
        eprintln!("error writing output: {e}");
        return 2;
    }
    code
}
