//! Command-line front end.
//!
//! Every subcommand prints one JSON `ReportRecord` to stdout (or writes it
//! atomically to `--out`). Bulk per-a and per-r data goes to `--csv`.
//! Exit codes: 0 success, 1 validation error, 2 assertion failure.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::acceptance::{run_suite, AcceptanceConfig, Outcome};
use crate::arith::{ContextOptions, PrimeContext, DEFAULT_PRIME_CAP};
use crate::error::{Error, Result};
use crate::fft::DftAlgorithm;
use crate::io::{fmt_f64, read_table, write_atomic, write_table, Csv};
use crate::kloosterman::{
    angles, kloosterman_table_batch, kloosterman_table_batch_with, kloosterman_table_naive,
    max_abs_diff, weil_ratio, AngleTable, KloostermanTable, Method, NAIVE_ORACLE_CAP,
};
use crate::nonlinearity::{
    correlation_scan, correlation_shape, correlation_sum, sign_vector, summarize, wht,
};
use crate::sample::{Sampler, RNG_ALGORITHM};
use crate::sato_tate::{
    character_sum, default_windows, deviation_shape, deviation_sweep, discrepancy_of_window,
    discrepancy_shape, exp_sum, exp_sum_scan, exp_sum_shape, quadratic_count, sato_tate_measure,
    scaled_deviation_scan, window_count, window_csv, Window,
};
use crate::sumset::{
    beatty_count, fourier_decomposition, materialize, prodset_count, sumset_bound,
    sumset_count_with, sumset_report, threshold_met, CountMethod, ResidueSet, SetSpec,
    SumsetReport, DEFAULT_EPSILON,
};

/// Agreement required between a stored table and its recomputation.
pub const VERIFY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "kloostat",
    version,
    about = "Kloosterman sums, Sato-Tate angle statistics and sign-sequence nonlinearity over F_p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute, store or verify a table of K_p(a), a = 1..p-1.
    Table(TableArgs),
    /// Window counts against the Sato-Tate measure, and the deviation sweep.
    Stats(StatsArgs),
    /// Star discrepancy of lambda A_p(alpha, beta) / p.
    Discrepancy(DiscrepancyArgs),
    /// Exponential sums over a window set.
    Expsum(ExpsumArgs),
    /// Multiplicative character sums over a window set.
    Charsum(CharsumArgs),
    /// Quadratic residues in a window set.
    Quadratic(QuadraticArgs),
    /// Pairs (u, v) with u + v in a window set.
    Sumset(PairArgs),
    /// Pairs (u, v) with u v in a window set.
    Prodset(PairArgs),
    /// Beatty sequence members in a window set.
    Beatty(BeattyArgs),
    /// Walsh spectrum and nonlinearity of the sign function.
    Nonlinearity(NonlinearityArgs),
    /// Correlation sums of the sign function.
    Correlation(CorrelationArgs),
    /// Acceptance suite, or a per-prime battery with --p.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
struct PrimeArgs {
    /// Odd prime modulus.
    #[arg(long)]
    p: Option<u64>,
    /// Load K_p from a KLST file instead of computing it.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Largest accepted prime (hard limit 2^31).
    #[arg(long, default_value_t = DEFAULT_PRIME_CAP)]
    prime_cap: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct WindowArgs {
    /// Window start in [0, pi]; accepts `pi`, `pi/2`, `3pi/4`.
    #[arg(long, default_value = "0", value_parser = parse_angle)]
    alpha: f64,
    /// Window end in [0, pi].
    #[arg(long, default_value = "pi", value_parser = parse_angle)]
    beta: f64,
}

impl WindowArgs {
    fn window(&self) -> Result<Window> {
        Window::new(self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
struct OutArgs {
    /// Write the JSON record here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum MethodArg {
    Naive,
    Batch,
    Rader,
    Both,
}

#[derive(Debug, Args, Serialize)]
struct TableArgs {
    /// Odd prime modulus (optional with --verify).
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, value_enum, default_value = "batch")]
    method: MethodArg,
    /// Run the naive path above its size cap.
    #[arg(long)]
    force: bool,
    #[arg(long, default_value_t = DEFAULT_PRIME_CAP)]
    prime_cap: u64,
    /// Write the table in KLST format.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a, K_p(a), psi_p(a) as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Recompute a stored table by an independent method and compare.
    #[arg(long, conflicts_with = "out")]
    verify: Option<PathBuf>,
    /// Write the JSON record here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct StatsArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    /// Window start; with --beta selects a single window.
    #[arg(long, value_parser = parse_angle, requires = "beta")]
    alpha: Option<f64>,
    #[arg(long, value_parser = parse_angle, requires = "alpha")]
    beta: Option<f64>,
    /// Comma-separated lambda values for the scaled-subset scan.
    #[arg(long, value_delimiter = ',', requires = "m")]
    lambda: Vec<u64>,
    /// Comma-separated M values for the scaled-subset scan.
    #[arg(long, value_delimiter = ',', requires = "lambda")]
    m: Vec<u64>,
    /// Per-window CSV: alpha, beta, count, measure, deviation, ratio.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
struct DiscrepancyArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    #[command(flatten)]
    window: WindowArgs,
    /// Comma-separated multipliers.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    lambda: Vec<u64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
struct ExpsumArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    /// Single window; without it the default window grid is scanned.
    #[arg(long, value_parser = parse_angle, requires = "beta")]
    alpha: Option<f64>,
    #[arg(long, value_parser = parse_angle, requires = "alpha")]
    beta: Option<f64>,
    /// Comma-separated frequencies; without it `--samples` random ones.
    #[arg(long, value_delimiter = ',')]
    lambda: Vec<u64>,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
struct CharsumArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    #[command(flatten)]
    window: WindowArgs,
    /// Comma-separated character indices, nonzero mod p - 1.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    k: Vec<u64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
struct QuadraticArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum CountArg {
    Auto,
    Loop,
    Convolution,
}

impl From<CountArg> for CountMethod {
    fn from(c: CountArg) -> Self {
        match c {
            CountArg::Auto => CountMethod::Auto,
            CountArg::Loop => CountMethod::Loop,
            CountArg::Convolution => CountMethod::Convolution,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct PairArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    #[command(flatten)]
    window: WindowArgs,
    /// First set: interval:LO:HI, explicit:A,B,..., random:SIZE:SEED,
    /// beatty:THETA:RHO:M or geometric:START:RATIO:LENGTH.
    #[arg(long, value_parser = parse_set)]
    u: SetSpec,
    /// Second set, same syntax.
    #[arg(long, value_parser = parse_set)]
    v: SetSpec,
    /// Exponent slack in the threshold #U #V >= p^(3/2 + epsilon).
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, value_enum, default_value = "auto")]
    count: CountArg,
    /// Add the additive-character decomposition of the count.
    #[arg(long)]
    decompose: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
struct BeattyArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long)]
    theta: f64,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long)]
    m: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
struct NonlinearityArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    /// Spectrum CSV: r, coeff.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
struct CorrelationArgs {
    #[command(flatten)]
    prime: PrimeArgs,
    /// Evaluate one sum at (M, c1, c2); otherwise scan random triples.
    #[arg(long, requires_all = ["c1", "c2"])]
    m: Option<u64>,
    #[arg(long, requires = "m")]
    c1: Option<u64>,
    #[arg(long, requires = "m")]
    c2: Option<u64>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args, Serialize)]
struct ReportArgs {
    /// Run the per-prime battery instead of the acceptance suite.
    #[arg(long)]
    p: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_PRIME_CAP)]
    prime_cap: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Allowed ratio of each measured quantity to its bound shape.
    #[arg(long, default_value_t = 10.0)]
    envelope: f64,
    #[command(flatten)]
    out: OutArgs,
}

fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || format!("cannot parse angle {s:?}");
    let Some(idx) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let (head, tail) = (t[..idx].trim_end_matches('*'), &t[idx + 2..]);
    let k = if head.is_empty() {
        1.0
    } else {
        head.parse::<f64>().map_err(|_| bad())?
    };
    let d = match tail.strip_prefix('/') {
        Some(d) => d.parse::<f64>().map_err(|_| bad())?,
        None if tail.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(k * PI / d)
}

fn parse_set(s: &str) -> std::result::Result<SetSpec, String> {
    s.parse::<SetSpec>().map_err(|e| e.to_string())
}

/// Envelope around every JSON output.
#[derive(Debug, Serialize)]
pub struct ReportRecord<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: serde_json::Value,
    pub rng: &'static str,
    pub payload: T,
    /// Seconds per phase; the only nondeterministic field.
    pub timing: BTreeMap<String, f64>,
}

struct Timer {
    phases: BTreeMap<String, f64>,
    last: Instant,
}

impl Timer {
    fn new() -> Self {
        Timer {
            phases: BTreeMap::new(),
            last: Instant::now(),
        }
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        *self.phases.entry(name.to_string()).or_default() += (now - self.last).as_secs_f64();
        self.last = now;
    }
}

fn emit<C: Serialize, T: Serialize>(
    command: &'static str,
    config: &C,
    payload: T,
    timer: Timer,
    out: Option<&Path>,
) -> Result<()> {
    let record = ReportRecord {
        tool: "kloostat",
        version: crate::VERSION,
        command,
        config: serde_json::to_value(config)?,
        rng: RNG_ALGORITHM,
        payload,
        timing: timer.phases,
    };
    let mut text = serde_json::to_string_pretty(&record)?;
    text.push('\n');
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Loaded {
    ctx: PrimeContext,
    table: KloostermanTable,
    angles: AngleTable,
}

fn load(args: &PrimeArgs, dlog: bool, timer: &mut Timer) -> Result<Loaded> {
    let opts = ContextOptions {
        cap: args.prime_cap,
        dlog,
    };
    let table = match (&args.table, args.p) {
        (Some(path), p) => read_table(path, p)?,
        (None, Some(p)) => {
            let ctx = PrimeContext::with_options(p, opts)?;
            timer.lap("context");
            let t = kloosterman_table_batch(&ctx)?;
            timer.lap("table");
            let angles = angles(&t)?;
            timer.lap("angles");
            return Ok(Loaded {
                ctx,
                table: t,
                angles,
            });
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "one of --p or --table is required".into(),
            ))
        }
    };
    timer.lap("read");
    let ctx = PrimeContext::with_options(table.p(), opts)?;
    timer.lap("context");
    let angles = angles(&table)?;
    timer.lap("angles");
    Ok(Loaded { ctx, table, angles })
}

#[derive(Debug, Serialize)]
struct TablePayload {
    p: u64,
    method: Method,
    err_bound: f64,
    weil_ratio: f64,
    first_moment: f64,
    second_moment: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_check: Option<CrossCheck>,
}

#[derive(Debug, Serialize)]
struct CrossCheck {
    reference: &'static str,
    max_abs_diff: f64,
    tolerance: f64,
    agree: bool,
}

fn table_payload(t: &KloostermanTable, cross_check: Option<CrossCheck>) -> TablePayload {
    TablePayload {
        p: t.p(),
        method: t.method(),
        err_bound: t.err_bound(),
        weil_ratio: weil_ratio(t),
        first_moment: t.first_moment(),
        second_moment: t.second_moment(),
        cross_check,
    }
}

/// Independent recomputation: naive tables are checked by the transform,
/// transform tables by the naive sum, or by Rader above the naive cap.
fn cross_check(ctx: &PrimeContext, t: &KloostermanTable) -> Result<CrossCheck> {
    let (reference, other) = match t.method() {
        Method::Naive => ("batch_dft", kloosterman_table_batch(ctx)?),
        Method::BatchDft if ctx.p() <= NAIVE_ORACLE_CAP => {
            ("naive", kloosterman_table_naive(ctx, false)?)
        }
        Method::BatchDft => (
            "rader",
            kloosterman_table_batch_with(ctx, DftAlgorithm::Rader)?,
        ),
    };
    let diff = max_abs_diff(t, &other);
    Ok(CrossCheck {
        reference,
        max_abs_diff: diff,
        tolerance: VERIFY_TOLERANCE,
        agree: diff < VERIFY_TOLERANCE,
    })
}

fn assert_agree(c: &CrossCheck) -> Result<()> {
    if c.agree {
        Ok(())
    } else {
        Err(Error::VerificationFailed {
            diff: c.max_abs_diff,
            tolerance: c.tolerance,
        })
    }
}

fn cmd_table(args: &TableArgs) -> Result<()> {
    let mut timer = Timer::new();
    let opts = ContextOptions {
        cap: args.prime_cap,
        dlog: false,
    };
    if let Some(path) = &args.verify {
        let t = read_table(path, args.p)?;
        let ctx = PrimeContext::with_options(t.p(), opts)?;
        timer.lap("read");
        let check = cross_check(&ctx, &t)?;
        timer.lap("verify");
        let ok = check.agree;
        let diff = (check.max_abs_diff, check.tolerance);
        emit(
            "table",
            args,
            table_payload(&t, Some(check)),
            timer,
            args.json.as_deref(),
        )?;
        return if ok {
            Ok(())
        } else {
            Err(Error::VerificationFailed {
                diff: diff.0,
                tolerance: diff.1,
            })
        };
    }
    let p = args
        .p
        .ok_or_else(|| Error::InvalidArgument("--p is required unless --verify is given".into()))?;
    let ctx = PrimeContext::with_options(p, opts)?;
    timer.lap("context");
    let (t, check) = match args.method {
        MethodArg::Naive => (kloosterman_table_naive(&ctx, args.force)?, None),
        MethodArg::Batch => (kloosterman_table_batch(&ctx)?, None),
        MethodArg::Rader => (
            kloosterman_table_batch_with(&ctx, DftAlgorithm::Rader)?,
            None,
        ),
        MethodArg::Both => {
            let naive = kloosterman_table_naive(&ctx, args.force)?;
            let batch = kloosterman_table_batch(&ctx)?;
            let diff = max_abs_diff(&naive, &batch);
            let check = CrossCheck {
                reference: "naive",
                max_abs_diff: diff,
                tolerance: VERIFY_TOLERANCE,
                agree: diff < VERIFY_TOLERANCE,
            };
            (batch, Some(check))
        }
    };
    timer.lap("table");
    let ang = angles(&t)?;
    timer.lap("angles");
    if let Some(path) = &args.out {
        write_table(&t, path)?;
    }
    if let Some(path) = &args.csv {
        let mut csv = Csv::new(&["a", "k", "psi"]);
        for ((a, k), (_, psi)) in t.iter().zip(ang.iter()) {
            csv.row(&[a.to_string(), fmt_f64(k), fmt_f64(psi)]);
        }
        write_atomic(path, csv.finish().as_bytes())?;
    }
    timer.lap("write");
    let failed = check.as_ref().map(|c| !c.agree).unwrap_or(false);
    let err = check.as_ref().map(|c| (c.max_abs_diff, c.tolerance));
    emit(
        "table",
        args,
        table_payload(&t, check),
        timer,
        args.json.as_deref(),
    )?;
    match (failed, err) {
        (true, Some((diff, tolerance))) => Err(Error::VerificationFailed { diff, tolerance }),
        _ => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct WindowRow {
    alpha: f64,
    beta: f64,
    count: u64,
    measure: f64,
    deviation: f64,
    ratio: f64,
}

fn window_row(ang: &AngleTable, w: &Window) -> WindowRow {
    let p = ang.p();
    let count = window_count(ang, w);
    let measure = sato_tate_measure(w);
    let deviation = count as f64 - measure * p as f64;
    WindowRow {
        alpha: w.alpha(),
        beta: w.beta(),
        count,
        measure,
        deviation,
        ratio: deviation.abs() / deviation_shape(p),
    }
}

#[derive(Debug, Serialize)]
struct StatsPayload {
    p: u64,
    /// Count of the single requested window.
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<u64>,
    windows: Vec<WindowRow>,
    deviation: crate::sato_tate::Deviation,
    deviation_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaled: Option<crate::sato_tate::ScaledScan>,
}

fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, false, &mut timer)?;
    let windows = match (args.alpha, args.beta) {
        (Some(a), Some(b)) => vec![Window::new(a, b)?],
        _ => default_windows(),
    };
    let rows: Vec<WindowRow> = windows.iter().map(|w| window_row(&l.angles, w)).collect();
    let dev = deviation_sweep(&l.angles);
    timer.lap("windows");
    let scaled = if args.lambda.is_empty() {
        None
    } else {
        Some(scaled_deviation_scan(
            &l.ctx,
            &l.angles,
            &args.lambda,
            &args.m,
            &windows,
        )?)
    };
    timer.lap("scaled");
    if let Some(path) = &args.csv {
        write_atomic(path, window_csv(&l.angles, &windows).as_bytes())?;
    }
    let payload = StatsPayload {
        p: l.ctx.p(),
        count: (rows.len() == 1).then(|| rows[0].count),
        windows: rows,
        deviation_ratio: dev.one_sided / deviation_shape(l.ctx.p()),
        deviation: dev,
        scaled,
    };
    emit("stats", args, payload, timer, args.out.out.as_deref())
}

#[derive(Debug, Serialize)]
struct DiscrepancyRow {
    lambda: u64,
    discrepancy: f64,
    ratio: f64,
}

fn cmd_discrepancy(args: &DiscrepancyArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, false, &mut timer)?;
    let w = args.window.window()?;
    let shape = discrepancy_shape(l.ctx.p());
    let rows = args
        .lambda
        .iter()
        .map(|&lambda| {
            let d = discrepancy_of_window(&l.ctx, &l.angles, lambda, &w)?;
            Ok(DiscrepancyRow {
                lambda,
                discrepancy: d,
                ratio: d / shape,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    timer.lap("discrepancy");
    emit("discrepancy", args, rows, timer, args.out.out.as_deref())
}

#[derive(Debug, Serialize)]
struct ComplexValue {
    re: f64,
    im: f64,
    abs: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue {
            re: z.re,
            im: z.im,
            abs: z.norm(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ExpsumRow {
    lambda: u64,
    alpha: f64,
    beta: f64,
    value: ComplexValue,
    ratio: f64,
}

#[derive(Debug, Serialize)]
struct ExpsumPayload {
    p: u64,
    rows: Vec<ExpsumRow>,
    scan: crate::sato_tate::ExpSumScan,
}

fn cmd_expsum(args: &ExpsumArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, false, &mut timer)?;
    let p = l.ctx.p();
    let windows = match (args.alpha, args.beta) {
        (Some(a), Some(b)) => vec![Window::new(a, b)?],
        _ => default_windows(),
    };
    let lambdas = if args.lambda.is_empty() {
        let count = args.samples.min(p as usize - 1);
        Sampler::new(args.seed).distinct_units(p, count)
    } else {
        args.lambda.clone()
    };
    let shape = exp_sum_shape(p);
    let mut rows = Vec::with_capacity(lambdas.len() * windows.len());
    for &lambda in &lambdas {
        for w in &windows {
            let z = exp_sum(&l.ctx, &l.angles, lambda, w)?;
            rows.push(ExpsumRow {
                lambda,
                alpha: w.alpha(),
                beta: w.beta(),
                ratio: z.norm() / shape,
                value: z.into(),
            });
        }
    }
    let scan = exp_sum_scan(&l.ctx, &l.angles, &lambdas, &windows)?;
    timer.lap("expsum");
    emit(
        "expsum",
        args,
        ExpsumPayload { p, rows, scan },
        timer,
        args.out.out.as_deref(),
    )
}

#[derive(Debug, Serialize)]
struct CharsumRow {
    k: u64,
    value: ComplexValue,
    ratio: f64,
}

fn cmd_charsum(args: &CharsumArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, true, &mut timer)?;
    let w = args.window.window()?;
    let shape = exp_sum_shape(l.ctx.p());
    let rows = args
        .k
        .iter()
        .map(|&k| {
            let z = character_sum(&l.ctx, &l.angles, k, &w)?;
            Ok(CharsumRow {
                k,
                ratio: z.norm() / shape,
                value: z.into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    timer.lap("charsum");
    emit("charsum", args, rows, timer, args.out.out.as_deref())
}

#[derive(Debug, Serialize)]
struct QuadraticPayload {
    p: u64,
    alpha: f64,
    beta: f64,
    count: u64,
    /// mu_ST(alpha, beta) (p - 1); each square has two roots
    expected: f64,
    deviation: f64,
    ratio: f64,
}

fn cmd_quadratic(args: &QuadraticArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, false, &mut timer)?;
    let w = args.window.window()?;
    let p = l.ctx.p();
    let count = quadratic_count(&l.ctx, &l.angles, &w);
    let expected = sato_tate_measure(&w) * (p - 1) as f64;
    let deviation = count as f64 - expected;
    timer.lap("quadratic");
    let payload = QuadraticPayload {
        p,
        alpha: w.alpha(),
        beta: w.beta(),
        count,
        expected,
        deviation,
        ratio: deviation.abs() / exp_sum_shape(p),
    };
    emit("quadratic", args, payload, timer, args.out.out.as_deref())
}

fn pair_sets(args: &PairArgs, ctx: &PrimeContext) -> Result<(ResidueSet, ResidueSet)> {
    Ok((materialize(&args.u, ctx)?, materialize(&args.v, ctx)?))
}

#[derive(Debug, Serialize)]
struct SumsetPayload {
    #[serde(flatten)]
    report: SumsetReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<crate::sumset::FourierDecomposition>,
}

fn cmd_sumset(args: &PairArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, false, &mut timer)?;
    let w = args.window.window()?;
    let (u, v) = pair_sets(args, &l.ctx)?;
    timer.lap("sets");
    let mut report = sumset_report(&u, &v, &l.angles, &w, args.epsilon)?;
    if args.count != CountArg::Auto {
        // the report always counts by the automatic method; cross-check
        let observed = sumset_count_with(&u, &v, &l.angles, &w, args.count.into())?;
        if observed != report.observed {
            return Err(Error::InvalidArgument(format!(
                "count methods disagree: {observed} vs {}",
                report.observed
            )));
        }
        report.observed = observed;
    }
    timer.lap("count");
    let decomposition = if args.decompose {
        Some(fourier_decomposition(&u, &v, &l.angles, &w)?)
    } else {
        None
    };
    timer.lap("decompose");
    emit(
        "sumset",
        args,
        SumsetPayload {
            report,
            decomposition,
        },
        timer,
        args.out.out.as_deref(),
    )
}

#[derive(Debug, Serialize)]
struct ProdsetPayload {
    p: u64,
    alpha: f64,
    beta: f64,
    size_u: u64,
    size_v: u64,
    observed: u64,
    main_term: f64,
    abs_error: f64,
    /// Same shape as the sum-set bound.
    bound: f64,
    ratio: f64,
    threshold_met: bool,
}

fn cmd_prodset(args: &PairArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, false, &mut timer)?;
    let w = args.window.window()?;
    let (u, v) = pair_sets(args, &l.ctx)?;
    timer.lap("sets");
    let p = l.ctx.p();
    let observed = prodset_count(&u, &v, &l.angles, &w)?;
    timer.lap("count");
    let (su, sv) = (u.len() as u64, v.len() as u64);
    let main_term = sato_tate_measure(&w) * (su * sv) as f64;
    let abs_error = (observed as f64 - main_term).abs();
    let bound = sumset_bound(p, su, sv);
    let payload = ProdsetPayload {
        p,
        alpha: w.alpha(),
        beta: w.beta(),
        size_u: su,
        size_v: sv,
        observed,
        main_term,
        abs_error,
        bound,
        ratio: abs_error / bound,
        threshold_met: threshold_met(p, su, sv, args.epsilon),
    };
    emit("prodset", args, payload, timer, args.out.out.as_deref())
}

fn cmd_beatty(args: &BeattyArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, false, &mut timer)?;
    let w = args.window.window()?;
    let r = beatty_count(args.theta, args.rho, args.m, &l.angles, &w)?;
    timer.lap("beatty");
    emit("beatty", args, r, timer, args.out.out.as_deref())
}

fn cmd_nonlinearity(args: &NonlinearityArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, false, &mut timer)?;
    let signs = sign_vector(&l.ctx, &l.table)?;
    timer.lap("signs");
    let spectrum = wht(&signs);
    timer.lap("wht");
    if let Some(path) = &args.csv {
        write_atomic(path, spectrum.to_csv().as_bytes())?;
    }
    let summary = summarize(l.ctx.p(), &spectrum);
    emit(
        "nonlinearity",
        args,
        summary,
        timer,
        args.out.out.as_deref(),
    )
}

#[derive(Debug, Serialize)]
struct CorrelationPoint {
    p: u64,
    n: u32,
    m: u64,
    c1: u64,
    c2: u64,
    sum: i64,
    ratio: f64,
}

fn cmd_correlation(args: &CorrelationArgs) -> Result<()> {
    let mut timer = Timer::new();
    let l = load(&args.prime, false, &mut timer)?;
    let signs = sign_vector(&l.ctx, &l.table)?;
    timer.lap("signs");
    let p = l.ctx.p();
    let out = args.out.out.as_deref();
    match (args.m, args.c1, args.c2) {
        (Some(m), Some(c1), Some(c2)) => {
            let sum = correlation_sum(&signs, m, c1, c2)?;
            timer.lap("correlation");
            let point = CorrelationPoint {
                p,
                n: signs.n(),
                m,
                c1,
                c2,
                sum,
                ratio: sum.unsigned_abs() as f64 / correlation_shape(p, m),
            };
            emit("correlation", args, point, timer, out)
        }
        _ => {
            let scan = correlation_scan(p, &signs, args.samples, args.seed)?;
            timer.lap("correlation");
            emit("correlation", args, scan, timer, out)
        }
    }
}

#[derive(Debug, Serialize)]
struct SuitePayload {
    passed: bool,
    criteria: Vec<Outcome>,
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
    passed: bool,
}

fn check(name: &'static str, value: f64, limit: f64) -> Check {
    Check {
        name,
        value,
        limit,
        passed: value <= limit,
    }
}

#[derive(Debug, Serialize)]
struct BatteryPayload {
    p: u64,
    passed: bool,
    checks: Vec<Check>,
    table: TablePayload,
    windows: Vec<WindowRow>,
    deviation: crate::sato_tate::Deviation,
    exp_sums: crate::sato_tate::ExpSumScan,
    #[serde(skip_serializing_if = "Option::is_none")]
    sumset: Option<SumsetReport>,
    nonlinearity: crate::nonlinearity::NonlinearitySummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlation: Option<crate::nonlinearity::CorrelationScan>,
}

fn battery(args: &ReportArgs, p: u64, timer: &mut Timer) -> Result<BatteryPayload> {
    let ctx = PrimeContext::with_options(
        p,
        ContextOptions {
            cap: args.prime_cap,
            dlog: false,
        },
    )?;
    let table = kloosterman_table_batch(&ctx)?;
    timer.lap("table");
    let cross = cross_check(&ctx, &table)?;
    assert_agree(&cross)?;
    timer.lap("cross_check");
    let ang = angles(&table)?;
    let windows: Vec<WindowRow> = default_windows()
        .iter()
        .map(|w| window_row(&ang, w))
        .collect();
    let deviation = deviation_sweep(&ang);
    timer.lap("windows");
    let mut rng = Sampler::new(args.seed);
    let lambdas = rng.distinct_units(p, 20.min(p as usize - 1));
    let exp_sums = exp_sum_scan(&ctx, &ang, &lambdas, &default_windows())?;
    timer.lap("exp_sums");
    let sumset = if p >= 11 {
        let half = ((p - 1) / 2) as usize;
        let u = ResidueSet::new(p, rng.distinct_units(p, half))?;
        let v = ResidueSet::new(p, rng.distinct_units(p, half))?;
        let w = Window::new(PI / 4.0, 3.0 * PI / 4.0)?;
        Some(sumset_report(&u, &v, &ang, &w, DEFAULT_EPSILON)?)
    } else {
        None
    };
    timer.lap("sumset");
    let signs = sign_vector(&ctx, &table)?;
    let nonlinearity = summarize(p, &wht(&signs));
    let correlation = if signs.n() >= 1 {
        Some(correlation_scan(p, &signs, 100, args.seed)?)
    } else {
        None
    };
    timer.lap("nonlinearity");
    let mut checks = vec![
        check(
            "weil_ratio",
            weil_ratio(&table),
            1.0 + crate::kloosterman::WEIL_TOLERANCE,
        ),
        check("cross_check_diff", cross.max_abs_diff, VERIFY_TOLERANCE),
        check(
            "deviation_ratio",
            deviation.one_sided / deviation_shape(p),
            args.envelope,
        ),
        check("exp_sum_ratio", exp_sums.ratio, args.envelope),
        check("defect_ratio", nonlinearity.scaled_ratio, args.envelope),
    ];
    if let Some(s) = &sumset {
        checks.push(check("sumset_error_over_bound", s.ratio, 1.0));
    }
    if let Some(c) = &correlation {
        checks.push(check("correlation_ratio", c.max_ratio, args.envelope));
    }
    Ok(BatteryPayload {
        p,
        passed: checks.iter().all(|c| c.passed),
        checks,
        table: table_payload(&table, Some(cross)),
        windows,
        deviation,
        exp_sums,
        sumset,
        nonlinearity,
        correlation,
    })
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let mut timer = Timer::new();
    let out = args.out.out.as_deref();
    let passed = match args.p {
        Some(p) => {
            let payload = battery(args, p, &mut timer)?;
            let passed = payload.passed;
            emit("report", args, payload, timer, out)?;
            passed
        }
        None => {
            let cfg = AcceptanceConfig {
                seed: args.seed,
                ..AcceptanceConfig::default()
            };
            // progress lines go to stderr when the record goes to stdout
            let to_stdout = out.is_some();
            let criteria = run_suite(&cfg, |o| {
                if to_stdout {
                    println!("{}", o.line());
                } else {
                    eprintln!("{}", o.line());
                }
            })?;
            timer.lap("suite");
            let passed = criteria.iter().all(|o| o.passed);
            emit(
                "report",
                args,
                SuitePayload { passed, criteria },
                timer,
                out,
            )?;
            passed
        }
    };
    if passed {
        Ok(())
    } else {
        Err(Error::ChecksFailed)
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("KLOOSTAT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "KLOOSTAT_THREADS = {raw:?} is not a positive integer"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn dispatch(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Table(a) => cmd_table(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Discrepancy(a) => cmd_discrepancy(a),
        Command::Expsum(a) => cmd_expsum(a),
        Command::Charsum(a) => cmd_charsum(a),
        Command::Quadratic(a) => cmd_quadratic(a),
        Command::Sumset(a) => cmd_sumset(a),
        Command::Prodset(a) => cmd_prodset(a),
        Command::Beatty(a) => cmd_beatty(a),
        Command::Nonlinearity(a) => cmd_nonlinearity(a),
        Command::Correlation(a) => cmd_correlation(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Parses `argv` (program name first) and runs; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("kloostat: error: {e}");
            if e.is_assertion() {
                2
            } else {
                1
            }
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles_parse() {
        assert_eq!(parse_angle("0").unwrap(), 0.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["kloostat", "--help"]), 0);
        assert_eq!(run(["kloostat", "stats", "--bogus"]), 1);
        assert_eq!(run(["kloostat", "stats", "--p", "9"]), 1);
        assert_eq!(
            run(["kloostat", "stats", "--p", "5", "--alpha", "2", "--beta", "1"]),
            1
        );
    }
}
