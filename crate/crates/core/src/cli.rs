//! Command-line front end. [`run`] parses arguments, writes to the given
//! streams and returns the process exit code, so the binary stays a
//! one-liner and the commands can be tested in-process.

use crate::bounds::{report, BoundReport};
use crate::chi_opt::{optimize, OptimizerConfig};
use crate::error::{Error, Result};
use crate::fock::holevo::{gaussian_chi_report, GaussianChiReport};
use crate::fock::quadrature::GaussianGrid;
use crate::fock::ChannelConfig;
use crate::gaussian::ChannelParams;
use crate::gfunc::g;
use crate::verify::{self, Level};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNCERTIFIED: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

/// Oracle tolerances: χ against the closed form, and the spread of coherent
/// output entropies.
pub const ORACLE_CHI_TOLERANCE: f64 = 1e-3;
pub const ORACLE_ENTROPY_TOLERANCE: f64 = 1e-6;

/// Exact CSV header of `sweep`.
pub const CSV_HEADER: [&str; 8] = [
    "lambda",
    "n_env",
    "n_signal",
    "lower_bits",
    "upper_bits",
    "gap_bits",
    "refined_gap_bound_bits",
    "certified",
];

#[derive(Parser, Debug)]
#[command(
    name = "thermal-capacity",
    version,
    about = "Capacity bounds for bosonic thermal noise channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower and upper capacity bounds and the gap certificate.
    Bounds(TripleArgs),
    /// Bounds over a parameter grid, as CSV or JSON.
    Sweep(SweepArgs),
    /// Self-verification suites.
    Verify(VerifyArgs),
    /// Fock-space reproduction of the coherent-state rate.
    Oracle(TripleArgs),
    /// Search for ensembles with large Holevo quantity.
    Optimize(OptimizeArgs),
}

#[derive(Args, Debug)]
struct TripleArgs {
    /// Transmissivity λ in (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    /// Environment mean photon number N_E.
    #[arg(long, allow_negative_numbers = true)]
    ne: f64,
    /// Signal photon-number constraint N.
    #[arg(long, allow_negative_numbers = true)]
    n: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// `value` or `start:stop:count[:log]`.
    #[arg(long)]
    lambda: RangeSpec,
    #[arg(long)]
    ne: RangeSpec,
    #[arg(long)]
    n: RangeSpec,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value = "quick")]
    level: Level,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    ne: f64,
    #[arg(long, allow_negative_numbers = true)]
    n: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Ensemble size K (at most 16).
    #[arg(long, default_value_t = 16)]
    members: usize,
    /// Fock truncation D (at most 32).
    #[arg(long, default_value_t = 24)]
    dim: usize,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spacing {
    Linear,
    Log,
}

/// One axis of a sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl RangeSpec {
    pub fn single(value: f64) -> Self {
        RangeSpec {
            start: value,
            stop: value,
            count: 1,
            spacing: Spacing::Linear,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp(),
                }
            })
            // endpoints exactly as given
            .enumerate()
            .map(|(i, v)| if i == 0 { self.start } else if i + 1 == self.count { self.stop } else { v })
            .collect()
    }
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}"));
        let spec = match parts.as_slice() {
            [v] => RangeSpec::single(num(v)?),
            [a, b, c] | [a, b, c, _] => {
                let count: usize = c.trim().parse().map_err(|e| format!("count '{c}': {e}"))?;
                let spacing = match parts.get(3).map(|s| s.trim()) {
                    None | Some("lin") | Some("linear") => Spacing::Linear,
                    Some("log") => Spacing::Log,
                    Some(other) => return Err(format!("unknown spacing '{other}' (lin or log)")),
                };
                RangeSpec {
                    start: num(a)?,
                    stop: num(b)?,
                    count,
                    spacing,
                }
            }
            _ => return Err(format!("'{s}' is not VALUE or START:STOP:COUNT[:log]")),
        };
        if spec.count == 0 {
            return Err("count must be at least 1".into());
        }
        if !spec.start.is_finite() || !spec.stop.is_finite() {
            return Err("range ends must be finite".into());
        }
        if spec.spacing == Spacing::Log && !(spec.start > 0.0 && spec.stop > 0.0) {
            return Err("log spacing needs positive ends".into());
        }
        Ok(spec)
    }
}

/// A full sweep request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lambda: RangeSpec,
    pub n_env: RangeSpec,
    pub n_signal: RangeSpec,
}

impl SweepSpec {
    /// Grid points, λ outer, N_E middle, N inner.
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for l in self.lambda.values() {
            for ne in self.n_env.values() {
                for n in self.n_signal.values() {
                    out.push((l, ne, n));
                }
            }
        }
        out
    }
}

/// Evaluates every grid point (in parallel) and returns rows in grid order.
/// Fails on the first point outside the bounds' domain.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<BoundReport>> {
    spec.points()
        .par_iter()
        .map(|&(l, ne, n)| report(&ChannelParams::new(l, ne)?, n))
        .collect()
}

/// `v` with `digits` significant digits, fixed-point where sensible.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..=12).contains(&exp) {
        return format!("{:.*e}", digits - 1, v);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

fn sig(v: f64) -> String {
    format_sig(v, 10)
}

/// CSV rows with the exact [`CSV_HEADER`] schema.
pub fn write_csv<W: Write>(rows: &[BoundReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in rows {
        w.write_record([
            format!("{}", r.lambda),
            format!("{}", r.n_env),
            format!("{}", r.n_signal),
            sig(r.lower_bits),
            sig(r.upper_bits),
            sig(r.gap_bits),
            sig(r.refined_gap_bound_bits),
            r.certified.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io.to_string()),
        other => Error::Serialization(format!("{other:?}")),
    }
}

/// JSON row of a sweep: the CSV columns at full precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub n_env: f64,
    pub n_signal: f64,
    pub lower_bits: f64,
    pub upper_bits: f64,
    pub gap_bits: f64,
    pub refined_gap_bound_bits: f64,
    pub certified: bool,
}

impl From<&BoundReport> for SweepRow {
    fn from(r: &BoundReport) -> Self {
        SweepRow {
            lambda: r.lambda,
            n_env: r.n_env,
            n_signal: r.n_signal,
            lower_bits: r.lower_bits,
            upper_bits: r.upper_bits,
            gap_bits: r.gap_bits,
            refined_gap_bound_bits: r.refined_gap_bound_bits,
            certified: r.certified,
        }
    }
}

/// Result of `oracle`: Fock-space χ of the Gaussian coherent ensemble
/// against the closed-form coherent rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub lambda: f64,
    pub n_env: f64,
    pub n_signal: f64,
    pub chi_bits: f64,
    pub lower_bits: f64,
    pub chi_discrepancy_bits: f64,
    pub output_entropy_spread_nats: f64,
    pub dim: usize,
    pub env_dim: usize,
    pub members: usize,
    pub passed: bool,
}

pub fn oracle(params: &ChannelParams, n: f64) -> Result<OracleReport> {
    let lower = report(params, n)?.lower_bits;
    let rep: GaussianChiReport =
        gaussian_chi_report(params, n, &GaussianGrid::default(), None, ChannelConfig::default())?;
    let spread = rep.output_entropy_spread(g(params.injected_noise())?);
    let discrepancy = (rep.chi_bits - lower).abs();
    Ok(OracleReport {
        lambda: params.lambda(),
        n_env: params.n_env(),
        n_signal: n,
        chi_bits: rep.chi_bits,
        lower_bits: lower,
        chi_discrepancy_bits: discrepancy,
        output_entropy_spread_nats: spread,
        dim: rep.dim,
        env_dim: rep.env_dim,
        members: rep.members,
        passed: discrepancy <= ORACLE_CHI_TOLERANCE && spread <= ORACLE_ENTROPY_TOLERANCE,
    })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
        Command::Optimize(a) => cmd_optimize(&a, out),
    }
}

fn cmd_bounds(a: &TripleArgs, out: &mut dyn Write) -> Result<i32> {
    let rep = report(&ChannelParams::new(a.lambda, a.ne)?, a.n)?;
    match a.format {
        Format::Json => writeln!(out, "{}", to_json(&rep)?)?,
        Format::Csv => write_csv(std::slice::from_ref(&rep), &mut *out)?,
        Format::Text => {
            writeln!(out, "lambda                 {}", rep.lambda)?;
            writeln!(out, "n_env                  {}", rep.n_env)?;
            writeln!(out, "n_signal               {}", rep.n_signal)?;
            writeln!(out, "lower_bits             {}", sig(rep.lower_bits))?;
            writeln!(out, "upper_bits             {}", sig(rep.upper_bits))?;
            writeln!(out, "gap_bits               {}", sig(rep.gap_bits))?;
            writeln!(out, "refined_gap_bound_bits {}", sig(rep.refined_gap_bound_bits))?;
            writeln!(out, "universal_gap_bits     {}", sig(rep.universal_gap_bound_bits))?;
            writeln!(out, "certified              {}", rep.certified)?;
        }
    }
    Ok(if rep.certified { EXIT_OK } else { EXIT_UNCERTIFIED })
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = SweepSpec {
        lambda: a.lambda,
        n_env: a.ne,
        n_signal: a.n,
    };
    let rows = sweep(&spec)?;
    let mut sink: Box<dyn Write + '_> = match &a.out {
        Some(path) => Box::new(io::BufWriter::new(File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?)),
        None => Box::new(&mut *out),
    };
    match a.format {
        Format::Json => {
            let json: Vec<SweepRow> = rows.iter().map(SweepRow::from).collect();
            writeln!(sink, "{}", to_json(&json)?)?;
        }
        Format::Csv | Format::Text => write_csv(&rows, &mut sink)?,
    }
    sink.flush()?;
    drop(sink);
    if let Some(path) = &a.out {
        writeln!(out, "wrote {} rows to {}", rows.len(), path.display())?;
    }
    Ok(if rows.iter().all(|r| r.certified) { EXIT_OK } else { EXIT_UNCERTIFIED })
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let rep = verify::run(a.level, a.seed)?;
    if a.format == Format::Json {
        writeln!(out, "{}", to_json(&rep)?)?;
    } else {
        writeln!(out, "verify level={} seed={}", rep.level, rep.seed)?;
        for c in &rep.checks {
            writeln!(
                out,
                "{} [{}] {}: max discrepancy {:.3e} (tolerance {:.1e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.suite,
                c.invariant,
                c.max_discrepancy,
                c.tolerance
            )?;
        }
    }
    if rep.passed() {
        writeln!(out, "all {} checks passed", rep.checks.len())?;
        Ok(EXIT_OK)
    } else {
        for c in rep.failures() {
            writeln!(out, "violated invariant: [{}] {}", c.suite, c.invariant)?;
        }
        Ok(EXIT_VERIFICATION)
    }
}

fn cmd_oracle(a: &TripleArgs, out: &mut dyn Write) -> Result<i32> {
    let rep = oracle(&ChannelParams::new(a.lambda, a.ne)?, a.n)?;
    if a.format == Format::Json {
        writeln!(out, "{}", to_json(&rep)?)?;
    } else {
        writeln!(out, "chi_bits                {}", sig(rep.chi_bits))?;
        writeln!(out, "lower_bits              {}", sig(rep.lower_bits))?;
        writeln!(out, "chi_discrepancy_bits    {:.3e}", rep.chi_discrepancy_bits)?;
        writeln!(out, "entropy_spread_nats     {:.3e}", rep.output_entropy_spread_nats)?;
        writeln!(out, "dim                     {} (env {})", rep.dim, rep.env_dim)?;
        writeln!(out, "members                 {}", rep.members)?;
        writeln!(out, "passed                  {}", rep.passed)?;
    }
    Ok(if rep.passed { EXIT_OK } else { EXIT_VERIFICATION })
}

fn cmd_optimize(a: &OptimizeArgs, out: &mut dyn Write) -> Result<i32> {
    let params = ChannelParams::new(a.lambda, a.ne)?;
    let config = OptimizerConfig {
        members: a.members,
        dim: a.dim,
        max_iters: a.max_iters,
        tol: a.tol,
        seed: a.seed,
        ..OptimizerConfig::default()
    };
    let result = optimize(&params, a.n, &config)?;
    let json = to_json(&result.summary())?;
    match &a.out {
        Some(path) => std::fs::write(path, format!("{json}\n"))?,
        None => writeln!(out, "{json}")?,
    }
    Ok(if result.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Serialization(e.to_string()))
}
