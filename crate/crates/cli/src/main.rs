// Copyright (c) 2026 ksdist contributors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end for the `ksdist` library: load data, dispatch to
//! the right distribution engine, print a JSON report on stdout, and write
//! CSV plot data on request.
//!
//! Exit codes: 0 = success (a rejected null is a result, not an error),
//! 2 = usage error, 3 = data error, 4 = numerical error.

mod input;
mod report;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ksdist::asymptotic::{
    kolmogorov_critical, two_sample_asymptotic_pvalue, Method, TailResult,
};
use ksdist::empirical::{dkwm_band, ks_one_sample, ks_two_sample, Side};
use ksdist::gof::{
    bootstrap_test, dbr_test, ExponentialFamily, GofMethod, NormalFamily, ParametricFamily,
};
use ksdist::one_sample::{sbt_tail, tau_law};
use ksdist::oracle::{
    enumerate_interleavings, mc_hitting_time, mc_one_sample_tail, mc_two_sample_tail,
    null_calibration, CalibrationOptions, MIN_MC_REPS,
};
use ksdist::two_sample::{two_sample_exact_pvalue, TwoSampleEngine};
use ksdist::{KsError, KsStatistics64, Sample64, TailResult64};
use report::{prob_number, Details, TestReport};

/// Used when neither `--seed` nor `KS_SEED` is given, so that repeated
/// invocations are reproducible by default.
const DEFAULT_SEED: u64 = 0x6b73_6469_7374; // "ksdist"

const USAGE: i32 = 2;
const DATA: i32 = 3;
const NUMERICAL: i32 = 4;

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: USAGE, message: message.into() }
    }

    fn data(message: impl Into<String>) -> Self {
        Failure { code: DATA, message: message.into() }
    }
}

impl From<KsError> for Failure {
    fn from(e: KsError) -> Self {
        // Argument rejections are requests the engines cannot serve, which
        // is a usage problem; everything else is numerical.
        let code = match e {
            KsError::InvalidArgument(_) => USAGE,
            _ => NUMERICAL,
        };
        Failure { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(
    name = "ksdist",
    version,
    about = "Exact and asymptotic Kolmogorov-Smirnov distributions",
    after_help = "Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One-sample test of a fully specified continuous distribution.
    Ks1(Ks1Args),
    /// Two-sample test of distribution equality.
    Ks2(Ks2Args),
    /// Goodness of fit to a parametric family with estimated parameters.
    Gof(GofArgs),
    /// Distribution-free confidence band for the true CDF (CSV).
    Band(BandArgs),
    /// Exact law of the first boundary-crossing index (CSV).
    Tau(TauArgs),
    /// Critical values of the Kolmogorov limit law (CSV).
    Crit(CritArgs),
    /// Slow independent oracles: simulation and exhaustive enumeration.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    /// sup of |ECDF - reference|.
    Two,
    /// sup of (ECDF - reference).
    Plus,
    /// sup of (reference - ECDF).
    Minus,
}

impl SideArg {
    fn to_side(self) -> Side {
        match self {
            SideArg::Two => Side::Two,
            SideArg::Plus => Side::Plus,
            SideArg::Minus => Side::Minus,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SideArg::Two => "two",
            SideArg::Plus => "plus",
            SideArg::Minus => "minus",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ks1Method {
    /// Exact one-sided tail; two-sided falls back to the 2x bound.
    Auto,
    /// Exact finite-sample tail (one-sided only).
    Exact,
    /// min(1, 2 x exact one-sided) upper bound (two-sided only).
    Bound,
    /// Monte Carlo under the null, using --reps and --seed.
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ks2Method {
    /// Exact when equal sizes or enumeration is feasible, else asymptotic.
    Auto,
    /// Exact lattice tail; errors where no exact route exists.
    Exact,
    /// Limit-law tail.
    Asymptotic,
    /// Monte Carlo under the null, using --reps and --seed.
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GofMethodArg {
    /// Simulated limiting Gaussian process with grid-doubling check.
    Dbr,
    /// Parametric bootstrap with refitting.
    Bootstrap,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Normal,
    Exponential,
}

impl FamilyArg {
    fn build(self) -> Box<dyn ParametricFamily> {
        match self {
            FamilyArg::Normal => Box::new(NormalFamily),
            FamilyArg::Exponential => Box::new(ExponentialFamily),
        }
    }
}

/// Reference distribution for `ks1`: `uniform`, `normal:MU,SIGMA`, or
/// `exponential:RATE`.
#[derive(Clone, Debug)]
enum DistSpec {
    Uniform,
    Normal { mu: f64, sigma: f64 },
    Exponential { rate: f64 },
}

impl DistSpec {
    fn parse(s: &str) -> Result<Self, String> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        match (name, params) {
            ("uniform", None) => Ok(DistSpec::Uniform),
            ("uniform", Some(_)) => Err("uniform takes no parameters".into()),
            ("normal", Some(p)) => {
                let (mu_s, sigma_s) = p
                    .split_once(',')
                    .ok_or_else(|| "normal needs MU,SIGMA (e.g. normal:0,1)".to_string())?;
                let mu: f64 = mu_s.trim().parse().map_err(|_| format!("bad MU {mu_s:?}"))?;
                let sigma: f64 =
                    sigma_s.trim().parse().map_err(|_| format!("bad SIGMA {sigma_s:?}"))?;
                if !mu.is_finite() || !sigma.is_finite() || sigma <= 0.0 {
                    return Err(format!("normal needs finite MU and SIGMA > 0, got {mu},{sigma}"));
                }
                Ok(DistSpec::Normal { mu, sigma })
            }
            ("exponential", Some(p)) => {
                let rate: f64 = p.trim().parse().map_err(|_| format!("bad RATE {p:?}"))?;
                if !rate.is_finite() || rate <= 0.0 {
                    return Err(format!("exponential needs RATE > 0, got {rate}"));
                }
                Ok(DistSpec::Exponential { rate })
            }
            ("normal", None) => Err("normal needs parameters: normal:MU,SIGMA".into()),
            ("exponential", None) => Err("exponential needs a parameter: exponential:RATE".into()),
            _ => Err(format!(
                "unknown distribution {name:?}; expected uniform, normal:MU,SIGMA, or exponential:RATE"
            )),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            DistSpec::Uniform => x.clamp(0.0, 1.0),
            DistSpec::Normal { mu, sigma } => NormalFamily.cdf(&[*mu, sigma * sigma], x),
            DistSpec::Exponential { rate } => ExponentialFamily.cdf(&[*rate], x),
        }
    }

    fn label(&self) -> String {
        match self {
            DistSpec::Uniform => "uniform".into(),
            DistSpec::Normal { mu, sigma } => format!("normal(mu={mu}, sigma={sigma})"),
            DistSpec::Exponential { rate } => format!("exponential(rate={rate})"),
        }
    }
}

#[derive(Args)]
struct Ks1Args {
    /// Data file, one float per line, or `-` for stdin.
    file: String,
    /// Reference distribution: uniform | normal:MU,SIGMA | exponential:RATE.
    #[arg(long, value_parser = DistSpec::parse)]
    dist: DistSpec,
    #[arg(long, value_enum, default_value_t = SideArg::Two)]
    side: SideArg,
    #[arg(long, value_enum, default_value_t = Ks1Method::Auto)]
    method: Ks1Method,
    /// Monte Carlo replicates for --method mc.
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    #[arg(long, env = "KS_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Treat the input as CSV and read this column (header name or 0-based index).
    #[arg(long)]
    col: Option<String>,
    /// Write ECDF-vs-reference plot data (CSV) to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Ks2Args {
    /// First sample, one float per line, or `-` for stdin.
    file_x: String,
    /// Second sample.
    file_y: String,
    #[arg(long, value_enum, default_value_t = SideArg::Two)]
    side: SideArg,
    #[arg(long, value_enum, default_value_t = Ks2Method::Auto)]
    method: Ks2Method,
    /// Monte Carlo replicates for --method mc.
    #[arg(long, default_value_t = 100_000)]
    reps: u64,
    #[arg(long, env = "KS_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Treat inputs as CSV and read this column (header name or 0-based index).
    #[arg(long)]
    col: Option<String>,
    /// Write both-ECDFs plot data (CSV) to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GofArgs {
    /// Data file, one float per line, or `-` for stdin.
    file: String,
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value_t = GofMethodArg::Dbr)]
    method: GofMethodArg,
    /// Quantile-grid size for the dbr method.
    #[arg(long, default_value_t = 100)]
    grid: usize,
    /// Simulation draws (dbr) or bootstrap resamples.
    #[arg(long, default_value_t = 2000)]
    reps: u64,
    #[arg(long, env = "KS_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Treat the input as CSV and read this column (header name or 0-based index).
    #[arg(long)]
    col: Option<String>,
    /// Write ECDF-vs-fitted-CDF plot data (CSV) to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BandArgs {
    /// Data file, one float per line, or `-` for stdin.
    file: String,
    /// Simultaneous coverage level.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Treat the input as CSV and read this column (header name or 0-based index).
    #[arg(long)]
    col: Option<String>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TauArgs {
    /// Sample size.
    #[arg(long)]
    n: u64,
    /// Boundary shift in probability units (exactly one of --eps/--lambda).
    #[arg(long)]
    eps: Option<f64>,
    /// Boundary shift in normalized units, eps = lambda / sqrt(n).
    #[arg(long)]
    lambda: Option<f64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CritArgs {
    /// Tail probabilities to invert; may repeat. Default: a standard table.
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Also report epsilon = lambda / sqrt(n) for this sample size.
    #[arg(long)]
    n: Option<u64>,
    /// Inversion tolerance in probability units.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Simulate the one-sample one-sided or two-sided tail under uniformity.
    OneSampleTail {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Minus)]
        side: SideArg,
        #[arg(long, default_value_t = 1_000_000)]
        reps: u64,
        #[arg(long, env = "KS_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Simulate a two-sample tail at a lattice level under a shared null.
    TwoSampleTail {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        /// Statistic level whose exceedance probability is estimated.
        #[arg(long)]
        level: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Plus)]
        side: SideArg,
        #[arg(long, default_value_t = 1_000_000)]
        reps: u64,
        #[arg(long, env = "KS_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Simulate the first boundary-crossing index.
    HittingTime {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 1_000_000)]
        reps: u64,
        #[arg(long, env = "KS_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Exhaustively enumerate a two-sample statistic's exact distribution.
    Enumerate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum, default_value_t = SideArg::Plus)]
        side: SideArg,
    },
    /// Rejection rate of a goodness-of-fit test under its own null.
    Calibration {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// True parameter, comma separated. Default: normal 0,1; exponential 1.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        replicates: u64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = GofMethodArg::Dbr)]
        method: GofMethodArg,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, default_value_t = 2000)]
        sim_reps: u64,
        #[arg(long, env = "KS_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(f) = run(cli.cmd) {
        eprintln!("error: {}", f.message);
        std::process::exit(f.code);
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Ks1(a) => run_ks1(a),
        Cmd::Ks2(a) => run_ks2(a),
        Cmd::Gof(a) => run_gof(a),
        Cmd::Band(a) => run_band(a),
        Cmd::Tau(a) => run_tau(a),
        Cmd::Crit(a) => run_crit(a),
        Cmd::Oracle(o) => run_oracle(o),
    }
}

fn load(path: &str, col: Option<&str>) -> Result<Sample64, Failure> {
    input::read_sample(path, col).map_err(Failure::data)
}

fn check_mc_reps(reps: u64) -> Result<(), Failure> {
    if reps < MIN_MC_REPS {
        return Err(Failure::usage(format!(
            "--reps must be at least {MIN_MC_REPS} for Monte Carlo, got {reps}"
        )));
    }
    Ok(())
}

/// Debug formatting of an f64 is the shortest string that parses back to
/// the same bits, so CSV output round-trips exactly.
fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

fn emit_csv(out: Option<&PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn tie_warnings(samples: &[(&str, &Sample64)]) -> Vec<String> {
    let mut warnings = Vec::new();
    for (label, s) in samples {
        if s.has_ties() {
            warnings.push(format!(
                "sample {label} contains tied values; p-values assume a continuous model"
            ));
        }
    }
    warnings
}

/// Sorted values shared by both samples; ties across files break the
/// continuity assumption behind the exact two-sample law.
fn cross_ties(x: &Sample64, y: &Sample64) -> bool {
    let (xs, ys) = (x.values(), y.values());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        if xs[i] == ys[j] {
            return true;
        }
        if xs[i] < ys[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    false
}

fn exact_string(r: &num_rational::BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn run_ks1(a: Ks1Args) -> Result<(), Failure> {
    // Reject impossible method/side pairings before touching the data.
    match (a.side, a.method) {
        (SideArg::Two, Ks1Method::Exact) => {
            return Err(Failure::usage(
                "no exact two-sided one-sample law is implemented; use --method bound or --method mc",
            ));
        }
        (SideArg::Plus | SideArg::Minus, Ks1Method::Bound) => {
            return Err(Failure::usage(
                "--method bound applies only to --side two; one-sided tails are exact",
            ));
        }
        (_, Ks1Method::Mc) => check_mc_reps(a.reps)?,
        _ => {}
    }
    let sample = load(&a.file, a.col.as_deref())?;
    let n = sample.n() as u64;
    let stats = ks_one_sample(&sample, |x| a.dist.cdf(x)).map_err(Failure::from)?;
    let observed = stats.by_side(a.side.to_side());

    let mut seed_used = None;
    let (tail, method_name): (TailResult64, &str) = match (a.side, a.method) {
        (SideArg::Plus | SideArg::Minus, Ks1Method::Auto | Ks1Method::Exact) => {
            let p = sbt_tail(n, observed)?;
            (TailResult { p, method: Method::Exact, err: 0.0, terms_used: 0 }, "exact")
        }
        (SideArg::Two, Ks1Method::Auto | Ks1Method::Bound) => {
            let p = (2.0 * sbt_tail(n, observed)?).min(1.0);
            (TailResult { p, method: Method::Bound, err: 0.0, terms_used: 0 }, "bound")
        }
        (SideArg::Two, Ks1Method::Exact) | (SideArg::Plus | SideArg::Minus, Ks1Method::Bound) => {
            unreachable!("rejected before data loading")
        }
        (side, Ks1Method::Mc) => {
            let est = mc_one_sample_tail(n, observed, side.to_side(), a.reps, a.seed)?;
            seed_used = Some(a.seed);
            let tail = TailResult {
                p: est.estimate,
                method: Method::MonteCarlo,
                err: est.se,
                terms_used: est.reps.min(u32::MAX as u64) as u32,
            };
            (tail, "monte-carlo")
        }
    };

    if let Some(out) = &a.out {
        let mut csv = String::from("x,ecdf,cdf\n");
        for &x in sample.values() {
            let e = sample.ecdf(x).map_err(Failure::from)?;
            let _ = writeln!(csv, "{},{},{}", fmt_f(x), fmt_f(e), fmt_f(a.dist.cdf(x)));
        }
        emit_csv(Some(out), &csv)?;
    }

    let report = TestReport {
        test: format!("ks1:{}", a.side.name()),
        n,
        m: None,
        statistic: stats.into(),
        p_value: tail.into(),
        p_exact: None,
        method: method_name.into(),
        dist: a.dist.label(),
        details: None,
        warnings: tie_warnings(&[("x", &sample)]),
        seed: seed_used,
    };
    print!("{}", report.to_json());
    Ok(())
}

fn run_ks2(a: Ks2Args) -> Result<(), Failure> {
    if a.side == SideArg::Two && a.method == Ks2Method::Exact {
        return Err(Failure::usage(
            "exact two-sample tails are one-sided; use --side plus or --side minus, \
             or --method asymptotic/mc for the two-sided statistic",
        ));
    }
    if a.method == Ks2Method::Mc {
        check_mc_reps(a.reps)?;
    }
    let x = load(&a.file_x, a.col.as_deref())?;
    let y = load(&a.file_y, a.col.as_deref())?;
    let (n, m) = (x.n() as u64, y.n() as u64);
    let stats = ks_two_sample(&x, &y);
    let observed = stats.by_side(a.side.to_side());

    // The one-sided exact engines take the statistic as a D+ of the pair
    // whose sizes come first; D-(x, y) equals D+(y, x) pointwise.
    let exact_route = |obs: f64| -> Result<_, Failure> {
        let t = match a.side {
            SideArg::Plus => two_sample_exact_pvalue(n, m, obs)?,
            SideArg::Minus => two_sample_exact_pvalue(m, n, obs)?,
            SideArg::Two => unreachable!("no exact two-sided route"),
        };
        Ok(t)
    };

    let mut seed_used = None;
    let mut p_exact = None;
    let (tail, method_name): (TailResult64, String) = match (a.side, a.method) {
        (SideArg::Plus | SideArg::Minus, Ks2Method::Auto) => {
            let t = exact_route(observed)?;
            p_exact = t.exact.as_ref().map(exact_string);
            (t.tail, t.engine.to_string())
        }
        (SideArg::Plus | SideArg::Minus, Ks2Method::Exact) => {
            let t = exact_route(observed)?;
            if t.engine == TwoSampleEngine::Asymptotic {
                return Err(Failure::usage(format!(
                    "exact enumeration is infeasible for n={n}, m={m}; drop --method exact"
                )));
            }
            p_exact = t.exact.as_ref().map(exact_string);
            (t.tail, t.engine.to_string())
        }
        (SideArg::Plus | SideArg::Minus, Ks2Method::Asymptotic) => {
            let lambda = (n as f64 * m as f64 / (n + m) as f64).sqrt() * observed;
            let p = (-2.0 * lambda * lambda).exp().min(1.0);
            let tail = TailResult { p, method: Method::Asymptotic, err: 0.0, terms_used: 1 };
            (tail, "asymptotic".into())
        }
        (SideArg::Two, Ks2Method::Auto | Ks2Method::Asymptotic) => {
            let t = two_sample_asymptotic_pvalue(n, m, observed)?;
            (t, "asymptotic".into())
        }
        (SideArg::Two, Ks2Method::Exact) => unreachable!("rejected before data loading"),
        (side, Ks2Method::Mc) => {
            let est = mc_two_sample_tail(n, m, observed, side.to_side(), a.reps, a.seed)?;
            seed_used = Some(a.seed);
            let tail = TailResult {
                p: est.estimate,
                method: Method::MonteCarlo,
                err: est.se,
                terms_used: est.reps.min(u32::MAX as u64) as u32,
            };
            (tail, "monte-carlo".into())
        }
    };

    let mut warnings = tie_warnings(&[("x", &x), ("y", &y)]);
    if cross_ties(&x, &y) {
        warnings.push(
            "samples x and y share equal values; the exact lattice law assumes no cross-sample ties"
                .into(),
        );
    }

    if let Some(out) = &a.out {
        let mut points: Vec<f64> = x.values().iter().chain(y.values()).copied().collect();
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        points.dedup();
        let mut csv = String::from("x,ecdf_x,ecdf_y\n");
        for &t in &points {
            let ex = x.ecdf(t).map_err(Failure::from)?;
            let ey = y.ecdf(t).map_err(Failure::from)?;
            let _ = writeln!(csv, "{},{},{}", fmt_f(t), fmt_f(ex), fmt_f(ey));
        }
        emit_csv(Some(out), &csv)?;
    }

    let report = TestReport {
        test: format!("ks2:{}", a.side.name()),
        n,
        m: Some(m),
        statistic: stats.into(),
        p_value: tail.into(),
        p_exact,
        method: method_name,
        dist: "empirical".into(),
        details: None,
        warnings,
        seed: seed_used,
    };
    print!("{}", report.to_json());
    Ok(())
}

fn run_gof(a: GofArgs) -> Result<(), Failure> {
    let sample = load(&a.file, a.col.as_deref())?;
    let n = sample.n() as u64;
    let fam = a.family.build();

    let (tail, theta_hat, details, method_name, mut warnings) = match a.method {
        GofMethodArg::Dbr => {
            let t = dbr_test(&sample, fam.as_ref(), a.grid, a.reps, a.seed)?;
            let details = Details::Dbr {
                theta_hat: t.theta_hat.clone(),
                observed: t.observed,
                base_p: prob_number(t.base_p),
                refined_p: prob_number(t.refined_p),
                doubled: t.doubled,
                grid_size: t.grid_size,
            };
            let mut warnings = Vec::new();
            if t.doubled {
                warnings.push(format!(
                    "grid-doubling moved the p-value by {:.3e}; reporting the refined grid of {}",
                    (t.refined_p - t.base_p).abs(),
                    t.grid_size
                ));
            }
            (t.tail, t.theta_hat, details, GofMethod::Dbr.to_string(), warnings)
        }
        GofMethodArg::Bootstrap => {
            let t = bootstrap_test(&sample, fam.as_ref(), a.reps, a.seed)?;
            let details = Details::Bootstrap {
                theta_hat: t.theta_hat.clone(),
                observed: t.observed,
                reps: a.reps,
                failures: t.failures,
            };
            let mut warnings = Vec::new();
            if t.failures > 0 {
                warnings.push(format!(
                    "{} of {} bootstrap refits failed and were excluded",
                    t.failures, a.reps
                ));
            }
            (t.tail, t.theta_hat, details, GofMethod::Bootstrap.to_string(), warnings)
        }
    };

    // The headline statistic is recomputed at the fitted parameter so the
    // report carries all three discrepancies, not just the scaled sup.
    let stats: KsStatistics64 =
        ks_one_sample(&sample, |t| fam.cdf(&theta_hat, t)).map_err(Failure::from)?;

    let dist = match a.family {
        FamilyArg::Normal => format!(
            "normal(mu={}, sigma={}; fitted)",
            theta_hat[0],
            theta_hat[1].sqrt()
        ),
        FamilyArg::Exponential => format!("exponential(rate={}; fitted)", theta_hat[0]),
    };

    if let Some(out) = &a.out {
        let mut csv = String::from("x,ecdf,fitted_cdf\n");
        for &t in sample.values() {
            let e = sample.ecdf(t).map_err(Failure::from)?;
            let _ = writeln!(csv, "{},{},{}", fmt_f(t), fmt_f(e), fmt_f(fam.cdf(&theta_hat, t)));
        }
        emit_csv(Some(out), &csv)?;
    }

    warnings.extend(tie_warnings(&[("x", &sample)]));
    let report = TestReport {
        test: "gof".into(),
        n,
        m: None,
        statistic: stats.into(),
        p_value: tail.into(),
        p_exact: None,
        method: method_name,
        dist,
        details: Some(details),
        warnings,
        seed: Some(a.seed),
    };
    print!("{}", report.to_json());
    Ok(())
}

fn run_band(a: BandArgs) -> Result<(), Failure> {
    let sample = load(&a.file, a.col.as_deref())?;
    let band = dkwm_band(&sample, a.level)?;
    let mut csv = String::from("x,ecdf,lower,upper\n");
    for &(x, _) in &band.upper.knots {
        let e = sample.ecdf(x).map_err(Failure::from)?;
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            fmt_f(x),
            fmt_f(e),
            fmt_f(band.lower.value_at(x)),
            fmt_f(band.upper.value_at(x))
        );
    }
    emit_csv(a.out.as_ref(), &csv)
}

fn run_tau(a: TauArgs) -> Result<(), Failure> {
    let lambda = match (a.eps, a.lambda) {
        (Some(e), None) => e * (a.n as f64).sqrt(),
        (None, Some(l)) => l,
        _ => return Err(Failure::usage("give exactly one of --eps or --lambda")),
    };
    let law = tau_law(a.n, lambda)?;
    let mut csv = String::from("j,support_point,prob\n");
    for atom in &law.atoms {
        let _ = writeln!(csv, "{},{},{}", atom.j, fmt_f(atom.support_point), fmt_f(atom.prob));
    }
    let _ = writeln!(csv, "inf,inf,{}", fmt_f(law.prob_infinity));
    emit_csv(a.out.as_ref(), &csv)
}

const CRIT_DEFAULT_ALPHAS: [f64; 7] = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001];

fn run_crit(a: CritArgs) -> Result<(), Failure> {
    let alphas: &[f64] =
        if a.alphas.is_empty() { &CRIT_DEFAULT_ALPHAS } else { &a.alphas };
    let mut csv = String::new();
    match a.n {
        Some(n) => {
            if n == 0 {
                return Err(Failure::usage("--n must be positive"));
            }
            csv.push_str("alpha,lambda,epsilon\n");
            for &alpha in alphas {
                let lam: f64 = kolmogorov_critical(alpha, a.tol)?;
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    fmt_f(alpha),
                    fmt_f(lam),
                    fmt_f(lam / (n as f64).sqrt())
                );
            }
        }
        None => {
            csv.push_str("alpha,lambda\n");
            for &alpha in alphas {
                let lam: f64 = kolmogorov_critical(alpha, a.tol)?;
                let _ = writeln!(csv, "{},{}", fmt_f(alpha), fmt_f(lam));
            }
        }
    }
    emit_csv(a.out.as_ref(), &csv)
}

fn print_json(value: serde_json::Value) {
    let mut s = serde_json::to_string_pretty(&value).expect("oracle output serializes");
    s.push('\n');
    print!("{s}");
}

fn parse_theta(family: FamilyArg, theta: Option<&str>) -> Result<Vec<f64>, Failure> {
    match theta {
        None => Ok(match family {
            FamilyArg::Normal => vec![0.0, 1.0],
            FamilyArg::Exponential => vec![1.0],
        }),
        Some(s) => s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Failure::usage(format!("bad theta component {tok:?}")))
            })
            .collect(),
    }
}

fn run_oracle(cmd: OracleCmd) -> Result<(), Failure> {
    match cmd {
        OracleCmd::OneSampleTail { n, eps, side, reps, seed } => {
            let est = mc_one_sample_tail(n, eps, side.to_side(), reps, seed)?;
            print_json(serde_json::json!({
                "oracle": "one-sample-tail",
                "n": n,
                "eps": eps,
                "side": side.name(),
                "estimate": est.estimate,
                "se": est.se,
                "reps": est.reps,
                "seed": est.seed,
            }));
        }
        OracleCmd::TwoSampleTail { n, m, level, side, reps, seed } => {
            let est = mc_two_sample_tail(n, m, level, side.to_side(), reps, seed)?;
            print_json(serde_json::json!({
                "oracle": "two-sample-tail",
                "n": n,
                "m": m,
                "level": level,
                "side": side.name(),
                "estimate": est.estimate,
                "se": est.se,
                "reps": est.reps,
                "seed": est.seed,
            }));
        }
        OracleCmd::HittingTime { n, lambda, reps, seed } => {
            let sim = mc_hitting_time(n, lambda, reps, seed)?;
            let frequencies: Vec<f64> = (0..sim.counts.len()).map(|j| sim.frequency(j)).collect();
            print_json(serde_json::json!({
                "oracle": "hitting-time",
                "n": sim.n,
                "lambda": sim.lambda,
                "epsilon": sim.epsilon,
                "counts": sim.counts,
                "count_infinity": sim.infinity,
                "frequencies": frequencies,
                "frequency_infinity": sim.frequency_infinity(),
                "reps": sim.reps,
                "seed": sim.seed,
            }));
        }
        OracleCmd::Enumerate { n, m, side } => {
            let dist = enumerate_interleavings(n, m, side.to_side())?;
            let atoms: Vec<serde_json::Value> = dist
                .atoms
                .iter()
                .map(|a| {
                    serde_json::json!({
                        "scaled": a.scaled,
                        "value": exact_string(&a.value),
                        "count": a.count,
                        "prob": exact_string(&a.prob),
                    })
                })
                .collect();
            print_json(serde_json::json!({
                "oracle": "enumerate",
                "n": dist.n,
                "m": dist.m,
                "statistic": side.name(),
                "total": dist.total,
                "atoms": atoms,
            }));
        }
        OracleCmd::Calibration {
            family,
            theta,
            n,
            replicates,
            alpha,
            method,
            grid,
            sim_reps,
            seed,
        } => {
            let theta = parse_theta(family, theta.as_deref())?;
            let fam = family.build();
            let gof_method = match method {
                GofMethodArg::Dbr => GofMethod::Dbr,
                GofMethodArg::Bootstrap => GofMethod::Bootstrap,
            };
            let opts = CalibrationOptions { grid_size: grid, sim_reps };
            let cal = null_calibration(
                fam.as_ref(),
                &theta,
                n,
                replicates,
                alpha,
                gof_method,
                seed,
                &opts,
            )?;
            print_json(serde_json::json!({
                "oracle": "calibration",
                "family": fam.name(),
                "theta": theta,
                "n": n,
                "replicates": cal.replicates,
                "alpha": alpha,
                "method": gof_method.to_string(),
                "grid_size": grid,
                "sim_reps": sim_reps,
                "seed": seed,
                "rejection_rate": cal.rejection_rate,
                "rejections": cal.rejections,
                "failures": cal.failures,
                "max_grid_shift": cal.max_grid_shift,
            }));
        }
    }
    Ok(())
}
