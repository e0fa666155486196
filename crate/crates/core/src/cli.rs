//! Command-line front end.
//!
//! [`run_command`] parses a token list, runs the command and returns the
//! exit status with everything it would print, so the binary is a thin
//! wrapper and tests can drive the exact same path.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::divergences::{divergence, DivergenceKind};
use crate::error::{invalid, Result};
use crate::experiments::{
    bound_suite, default_epsilon_grid, default_eps_stop, default_gaussian_grid, default_laplace_grid, default_suite,
    epsilon_family_study, gaussian_sweep, laplace_sweep, write_rows, write_sidecar, SweepMetadata,
};
use crate::grs::{empirical_with, grs_sample_with, index_distribution_of, GrsTrajectory};
use crate::measures::{make_pair, PairSpec, Point, SyntheticWidth};
use crate::rng::stream;
use crate::width::width_eval;

/// Environment variable capping worker threads; 0 or unset means automatic.
pub const THREADS_ENV: &str = "CRS_TOOLKIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "crs-toolkit", version, about = "Greedy rejection sampling and channel simulation divergences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print D_KL, D_CS or D_ACS of a pair in bits.
    Divergence {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Exact index law or sampler runs of greedy rejection sampling.
    Grs {
        #[arg(value_enum)]
        action: GrsAction,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long = "eps-stop")]
        eps_stop: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        runs: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Run a sweep and write CSV rows.
    Experiment {
        #[arg(value_enum)]
        sweep: SweepArg,
        /// Comma-separated grid values.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long = "eps-stop")]
        eps_stop: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check every bound on a suite of pairs and print a JSON report.
    Verify {
        /// `default` or a path to a JSON list of pair specs.
        #[arg(long)]
        suite: String,
    },
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    d: Option<u32>,
    /// Comma-separated target probabilities.
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated proposal probabilities.
    #[arg(long)]
    p: Option<String>,
    #[arg(long = "width-table")]
    width_table: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Laplace,
    Gaussian,
    Discrete,
    Synthetic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Kl,
    Cs,
    Acs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GrsAction {
    Entropy,
    Mean,
    Sample,
    Empirical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepArg {
    Laplace,
    Gaussian,
    Epsilon,
}

/// Exit status and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Numbers on stdout use nine digits after the point.
pub fn format_number(x: f64) -> String {
    format!("{x:.9}")
}

fn csv_list(name: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("--{name}: cannot parse {t:?} as a number")))
        })
        .collect()
}

fn require<T: Copy>(value: Option<T>, flag: &str, family: &str) -> Result<T> {
    value.ok_or_else(|| invalid(format!("--family {family} needs --{flag}")))
}

/// Reads an `h,w` table into a synthetic width.
pub fn read_width_table(path: &Path) -> Result<SyntheticWidth> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["h", "w"] {
        return Err(invalid(format!("{}: header must be exactly h,w", path.display())));
    }
    let (mut h, mut w) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record?;
        let num = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| invalid(format!("{}: bad row {:?}", path.display(), record)))
        };
        h.push(num(0)?);
        w.push(num(1)?);
    }
    Ok(SyntheticWidth::Table { h, w })
}

impl PairArgs {
    fn spec(&self) -> Result<PairSpec> {
        let spec = match self.family {
            FamilyArg::Laplace => PairSpec::laplace(require(self.b, "b", "laplace")?),
            FamilyArg::Gaussian => PairSpec::gaussian(
                require(self.mu, "mu", "gaussian")?,
                require(self.sigma, "sigma", "gaussian")?,
                require(self.d, "d", "gaussian")?,
            ),
            FamilyArg::Discrete => {
                let q = self.q.as_deref().ok_or_else(|| invalid("--family discrete needs --q"))?;
                let p = self.p.as_deref().ok_or_else(|| invalid("--family discrete needs --p"))?;
                PairSpec::discrete(&csv_list("q", q)?, &csv_list("p", p)?)
            }
            FamilyArg::Synthetic => {
                let path = self
                    .width_table
                    .as_deref()
                    .ok_or_else(|| invalid("--family synthetic needs --width-table"))?;
                PairSpec::synthetic(read_width_table(path)?)
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn point_text(x: &Point) -> String {
    match x {
        Point::Scalar(v) => format_number(*v),
        Point::Vector(v) => v.iter().map(|&c| format_number(c)).collect::<Vec<_>>().join(","),
        Point::Index(i) => i.to_string(),
    }
}

/// Parses and runs one command line (without the program name).
pub fn run_command<I, S>(args: I) -> CommandOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("crs-toolkit")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandOutput {
                    status: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandOutput {
                    status: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let run = || dispatch(cli.command);
    let result = match thread_cap() {
        Ok(Some(n)) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(invalid(format!("cannot build thread pool: {e}"))),
        },
        Ok(None) => run(),
        Err(e) => Err(e),
    };
    match result {
        Ok((status, stdout)) => CommandOutput {
            status,
            stdout,
            stderr: String::new(),
        },
        Err(e) => CommandOutput {
            status: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(invalid(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
        },
    }
}

fn dispatch(command: Command) -> Result<(i32, String)> {
    let mut out = String::new();
    match command {
        Command::Divergence {
            pair,
            kind,
            tol,
            format,
        } => {
            let spec = pair.spec()?;
            if let Some(t) = tol {
                if !(t > 0.0) {
                    return Err(invalid(format!("--tol must be positive, got {t}")));
                }
            }
            let kind = match kind {
                KindArg::Kl => DivergenceKind::KL,
                KindArg::Cs => DivergenceKind::CS,
                KindArg::Acs => DivergenceKind::ACS,
            };
            let report = divergence(&spec, kind, tol)?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&report)?).unwrap(),
                _ => writeln!(out, "{}", format_number(report.value_bits)).unwrap(),
            }
        }
        Command::Grs {
            action,
            pair,
            eps_stop,
            seed,
            runs,
            format,
        } => {
            let spec = pair.spec()?;
            let trajectory = GrsTrajectory::new(width_eval(&spec)?);
            match action {
                GrsAction::Entropy | GrsAction::Mean => {
                    let eps = eps_stop.unwrap_or_else(|| default_eps_stop(&spec));
                    let dist = index_distribution_of(&trajectory, eps)?;
                    if format == Some(Format::Json) {
                        writeln!(out, "{}", serde_json::to_string(&dist)?).unwrap();
                    } else {
                        let v = match action {
                            GrsAction::Entropy => dist.entropy_bits,
                            _ => dist.mean(),
                        };
                        writeln!(out, "{}", format_number(v)).unwrap();
                    }
                }
                GrsAction::Sample => {
                    let pair = make_pair(&spec)?;
                    let draw = grs_sample_with(&pair, &trajectory, &mut stream(seed, 0))?;
                    if format == Some(Format::Json) {
                        writeln!(out, "{}", serde_json::to_string(&draw)?).unwrap();
                    } else {
                        writeln!(out, "{}\t{}", draw.k, point_text(&draw.x)).unwrap();
                    }
                }
                GrsAction::Empirical => {
                    let pair = make_pair(&spec)?;
                    let result = empirical_with(&pair, &trajectory, seed, runs)?;
                    if format == Some(Format::Json) {
                        writeln!(out, "{}", serde_json::to_string(&result.histogram)?).unwrap();
                    } else {
                        out.push_str("k,count\n");
                        for (i, c) in result.histogram.iter().enumerate() {
                            if *c > 0 {
                                writeln!(out, "{},{}", i + 1, c).unwrap();
                            }
                        }
                    }
                }
            }
        }
        Command::Experiment {
            sweep,
            grid,
            out: path,
            mu,
            sigma,
            eps_stop,
            seed,
        } => {
            let grid = grid.as_deref().map(|g| csv_list("grid", g)).transpose()?;
            let mut buf = Vec::new();
            let meta = match sweep {
                SweepArg::Laplace => {
                    let grid = grid.unwrap_or_else(default_laplace_grid);
                    let eps = eps_stop.unwrap_or(1e-8);
                    write_rows(&laplace_sweep(&grid, eps)?, &mut buf)?;
                    SweepMetadata::new("laplace", seed, Some(eps), None, grid)
                }
                SweepArg::Gaussian => {
                    let dims = match grid {
                        None => default_gaussian_grid(),
                        Some(g) => g
                            .iter()
                            .map(|&x| {
                                if x >= 1.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                                    Ok(x as u32)
                                } else {
                                    Err(invalid(format!("--grid: dimension {x} is not a positive integer")))
                                }
                            })
                            .collect::<Result<_>>()?,
                    };
                    write_rows(&gaussian_sweep(&dims, mu, sigma)?, &mut buf)?;
                    let tol = if dims.iter().any(|&d| d > 1) { 1e-6 } else { 1e-9 };
                    SweepMetadata::new("gaussian", seed, None, Some(tol), dims.iter().map(|&d| d as f64).collect())
                }
                SweepArg::Epsilon => {
                    let grid = grid.unwrap_or_else(default_epsilon_grid);
                    let eps = eps_stop.unwrap_or(1e-12);
                    write_rows(&epsilon_family_study(&grid, eps)?, &mut buf)?;
                    SweepMetadata::new("epsilon", seed, Some(eps), Some(1e-9), grid)
                }
            };
            let text = String::from_utf8(buf).map_err(|e| invalid(e.to_string()))?;
            match path {
                Some(p) => {
                    std::fs::write(&p, &text)?;
                    let side = write_sidecar(&p, &meta)?;
                    writeln!(out, "wrote {} and {}", p.display(), side.display()).unwrap();
                }
                None => out.push_str(&text),
            }
        }
        Command::Verify { suite } => {
            let specs = if suite == "default" {
                default_suite()
            } else {
                let text = std::fs::read_to_string(&suite)?;
                serde_json::from_str::<Vec<PairSpec>>(&text)?
            };
            if specs.is_empty() {
                return Err(invalid("suite is empty"));
            }
            let report = bound_suite(&specs);
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?).unwrap();
            return Ok((if report.passed() { 0 } else { 1 }, out));
        }
    }
    Ok((0, out))
}
