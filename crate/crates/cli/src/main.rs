mod commands;
mod config;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{FileConfig, Output, Overrides, RunConfig};
use distint_core::DistError;
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE_EXIT: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "distint", version, about = "Distributional integrals, point values and boundary recoveries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Lower end of the interval.
    #[arg(long, global = true, allow_hyphen_values = true)]
    from: Option<f64>,
    /// Upper end of the interval.
    #[arg(long, global = true, allow_hyphen_values = true)]
    to: Option<f64>,
    /// Evaluation point.
    #[arg(long, global = true, allow_hyphen_values = true)]
    at: Option<f64>,
    #[arg(long, global = true, env = "DISTINT_TOL")]
    tol: Option<f64>,
    /// Highest Cesàro order tried.
    #[arg(long, global = true, env = "DISTINT_KMAX")]
    cesaro_order: Option<usize>,
    /// Highest order of local limits and point values.
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Ratio of the geometric t-mesh used by `verdict`.
    #[arg(long, global = true)]
    mesh_ratio: Option<f64>,
    /// `poisson`, `bump:R` or `bump:R:SHIFT`.
    #[arg(long, global = true, default_value = "poisson")]
    kernel: String,
    /// `lo:hi:n` or a comma separated list.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid_x: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid_t: Option<String>,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    /// Print the per-piece method trace.
    #[arg(long, global = true)]
    trace: bool,
    /// File of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MvtArg {
    First,
    Second,
    Bonnet,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PointMethod {
    /// Łojasiewicz point value.
    Direct,
    /// Limit of the Poisson integral.
    Poisson,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distributional integral over [--from, --to].
    Integrate {
        expr: String,
        /// Resolve endpoint singularities by Cesàro limits only.
        #[arg(long)]
        hake: bool,
    },
    /// Integral over [--from, infinity).
    Improper { expr: String },
    /// Point value at --at.
    Pointvalue {
        expr: String,
        #[arg(long, value_enum, default_value = "direct")]
        method: PointMethod,
    },
    /// One-sided value at --at.
    Lateral {
        expr: String,
        #[arg(long, value_enum)]
        side: SideArg,
    },
    /// Fourier coefficients of a periodic expression; with --at, the recovered value.
    Fourier {
        expr: String,
        /// Highest coefficient index.
        #[arg(long, default_value_t = 1000)]
        terms: usize,
        /// Ratios of the Cesàro sums compared at --at.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        ratios: Vec<f64>,
    },
    /// phi-transform on --grid-x by --grid-t.
    Phifield {
        expr: String,
        /// Atom `c,m,x0`, meaning `c delta^(m)(x - x0)`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        atom: Vec<String>,
    },
    /// Whether the phi-transform stays bounded below on [--from, --to].
    Verdict {
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        atom: Vec<String>,
    },
    /// Moments `int x^n f` over the line for n up to --order.
    Moments {
        expr: String,
        #[arg(long, default_value_t = 0)]
        order: u32,
    },
    /// Rebuild f on --grid-x from its n-th derivative and initial values at --from.
    Reconstruct {
        expr: String,
        /// `f(a), f'(a), ...`
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        inits: Vec<f64>,
    },
    /// Intermediate point of a mean value identity on [--from, --to].
    Mvt {
        expr: String,
        #[arg(long)]
        psi: String,
        #[arg(long, value_enum, default_value = "first")]
        kind: MvtArg,
    },
}

fn config(g: &Global) -> anyhow::Result<RunConfig> {
    let file = match &g.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let output = if g.json {
        Some(Output::Json)
    } else if g.csv {
        Some(Output::Csv)
    } else {
        None
    };
    let over = Overrides {
        tol: g.tol,
        k_max: g.cesaro_order,
        n_max: g.n_max,
        mesh_ratio: g.mesh_ratio,
        output,
        trace: g.trace,
    };
    RunConfig::resolve(over, file)
}

/// Prints the failure and returns its exit code.
fn fail(err: anyhow::Error) -> u8 {
    if let Some(DistError::Parse(d)) = err.downcast_ref::<DistError>() {
        eprintln!("error: parse error {d}");
        if let Some(input) = err.downcast_ref::<commands::Input>() {
            eprintln!("  {}", input.0);
            eprintln!("  {}^", " ".repeat(input.0[..d.position.min(input.0.len())].chars().count()));
        }
        return USAGE_EXIT;
    }
    eprintln!("error: {err:#}");
    match err.downcast_ref::<DistError>() {
        Some(DistError::ResidualNotBracketed(_) | DistError::EvDisagreement { .. }) => 3,
        _ => USAGE_EXIT,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_EXIT } else { 0 });
        }
    };
    let cfg = match config(&cli.global) {
        Ok(c) => c,
        Err(e) => return ExitCode::from(fail(e)),
    };
    match commands::run(&cli.command, &cli.global, &cfg) {
        Ok(report) => {
            print!("{}", report.render());
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => ExitCode::from(fail(e)),
    }
}
