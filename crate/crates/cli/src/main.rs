/// Expands `$body` with `$f` bound to `F_p` when `n = 1`, else to `F_{p^n}`.
macro_rules! with_field {
    ($p:expr, $n:expr, |$f:ident| $body:block) => {{
        if $n == 1 {
            let $f = &fpcx::field::PrimeField::new($p)?;
            $body
        } else {
            let $f = &fpcx::field::ExtField::new($p, $n)?;
            $body
        }
    }};
}

mod commands;
mod polyexpr;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fpcx::complexity::Family;
use fpcx::field::is_prime;
use fpcx::subsets::SubsetSpec;
use serde::Serialize;

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "fpcx", version, about = "Pseudorandom subsets of F_p from polynomial families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Well-distribution and correlation measures of R(f, S).
    Measure,
    /// Exact family complexity K_i(S, d) with witnesses.
    Complexity,
    /// Randomized and exhaustive checks of identities and bounds.
    Verify { check: verify::CheckKind },
    /// Squarefree witness for a partition of d + 2 points, or a full sweep.
    Construct {
        #[arg(long)]
        sweep: bool,
    },
    /// Exponential and character sums.
    Expsum { kind: commands::SumKind },
    /// Level-set point counts of the bilinear inverse sum.
    Curve { kind: commands::CurveKind },
}

#[derive(Debug, Clone, Copy, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(clap::Args, Debug, Clone, Serialize)]
pub struct Opts {
    /// A prime, a list `5,7,11`, or the primes in a range `11..31`.
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// Extension degree.
    #[arg(long, global = true, default_value_t = 1)]
    pub n: u32,
    /// Polynomial degree bound.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Number of points, terms or pattern size, depending on the command.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// P1 (degree ≤ d), P2 (squarefree) or P3 (split squarefree).
    #[arg(long, global = true)]
    pub family: Option<Family>,
    /// interval:r:s, invinterval:r:s, powers:ell or explicit:a,b,c
    #[arg(long, global = true)]
    pub subset: Option<SubsetSpec>,
    /// Points that must land in S.
    #[arg(long = "B", global = true, value_delimiter = ',')]
    pub b_points: Option<Vec<u64>>,
    /// Points that must land outside S.
    #[arg(long = "C", global = true, value_delimiter = ',')]
    pub c_points: Option<Vec<u64>>,
    /// Interval density in (0, 1).
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random instances per case.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Work cap for the exhaustive searches.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Polynomial such as `X^2 + 3`.
    #[arg(long, global = true)]
    pub poly: Option<String>,
    /// Use every odd prime up to this bound.
    #[arg(long, global = true)]
    pub pmax: Option<u64>,
    /// Level λ (field index).
    #[arg(long, global = true)]
    pub lambda: Option<u64>,
    /// Dilation α of the construction's pair count.
    #[arg(long, global = true)]
    pub alpha: Option<u64>,
    /// Coefficient `a` (or `h`) of a single-frequency sum.
    #[arg(long, global = true)]
    pub a: Option<u64>,
    /// Base point `b` of a single-frequency sum.
    #[arg(long, global = true)]
    pub at: Option<u64>,
    /// Shifts b_i of a bilinear instance.
    #[arg(long, global = true, value_delimiter = ',')]
    pub bvec: Option<Vec<u64>>,
    /// Shifts c_i of a bilinear instance.
    #[arg(long, global = true, value_delimiter = ',')]
    pub cvec: Option<Vec<u64>>,
    /// Weights d_i (bilinear instance, or numerators of a shifted-inverse sum).
    #[arg(long, global = true, value_delimiter = ',')]
    pub dvec: Option<Vec<u64>>,
    /// Shifts e_j of a shifted-inverse sum.
    #[arg(long, global = true, value_delimiter = ',')]
    pub evec: Option<Vec<u64>>,
    /// Worker threads; results do not depend on it.
    #[serde(skip)]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[serde(skip)]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

impl Opts {
    pub fn primes(&self) -> Result<Vec<u64>> {
        let spec = self.p.as_deref().context("--p is required")?;
        let ps: Vec<u64> = if let Some((lo, hi)) = spec.split_once("..") {
            let (lo, hi): (u64, u64) = (lo.parse()?, hi.parse()?);
            (lo..=hi).filter(|&x| is_prime(x)).collect()
        } else {
            spec.split(',').map(|t| t.trim().parse::<u64>()).collect::<Result<_, _>>()?
        };
        if ps.is_empty() {
            bail!("--p `{spec}` names no primes");
        }
        Ok(ps)
    }

    pub fn single_p(&self) -> Result<u64> {
        match self.primes()?.as_slice() {
            [p] => Ok(*p),
            _ => bail!("this command takes a single prime --p"),
        }
    }

    pub fn require_d(&self) -> Result<usize> {
        self.d.context("--d is required")
    }

    pub fn require_subset(&self) -> Result<&SubsetSpec> {
        self.subset.as_ref().context("--subset is required")
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let mut config = serde_json::json!({ "command": cli.command, "options": cli.opts });
    if let Some(opts) = config["options"].as_object_mut() {
        opts.retain(|_, v| !v.is_null());
    }
    let name = match &cli.command {
        Command::Measure => "measure",
        Command::Complexity => "complexity",
        Command::Verify { .. } => "verify",
        Command::Construct { .. } => "construct",
        Command::Expsum { .. } => "expsum",
        Command::Curve { .. } => "curve",
    };
    let mut report = Report::new(name, config);
    let o = &cli.opts;
    match &cli.command {
        Command::Measure => commands::measure(o, &mut report)?,
        Command::Complexity => commands::complexity(o, &mut report)?,
        Command::Verify { check } => verify::run(*check, o, &mut report)?,
        Command::Construct { sweep } => commands::construct(o, *sweep, &mut report)?,
        Command::Expsum { kind } => commands::expsum(*kind, o, &mut report)?,
        Command::Curve { kind } => commands::curve(*kind, o, &mut report)?,
    }
    Ok(report)
}

fn emit(cli: &Cli, report: &Report) -> Result<()> {
    let text = match cli.opts.format {
        Format::Json => report.to_json(rayon::current_num_threads())?,
        Format::Csv => report.to_csv().context("this command has no tabular output; use --format json")?,
    };
    match &cli.opts.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// 1 for a defect in a construction that should always succeed, 2 otherwise.
fn error_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<fpcx::Error>() {
        Some(fpcx::Error::ExhaustedSearch(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.opts.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = run(&cli).and_then(|r| emit(&cli, &r).map(|_| r));
    match outcome {
        Ok(r) if !r.passed() => ExitCode::from(1),
        Ok(r) => match r.incomplete_reason() {
            Some(why) => {
                eprintln!("budget: {why}");
                ExitCode::from(2)
            }
            None => ExitCode::SUCCESS,
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
