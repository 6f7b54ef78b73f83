//! Batch front-end for the bound-state dressing laboratory.
//!
//! Subcommands: `construct`, `evolve`, `scatter`, `greens`, `verify`.
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 numerical failure.

mod commands;
mod config;
mod emit;
mod error;
mod svg;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{validate, RunConfig};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "dressing-lab",
    about = "Bound-state dressing of 1-D potentials: construction, parametric evolution, scattering and identity verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV/JSON files
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also render line plots of every emitted CSV
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON run configuration; the built-in default suite runs without one
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for suite.json
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Accepted for grammar uniformity; verify emits no CSV to plot
    #[arg(long)]
    svg: bool,
    /// Run a single check family (e.g. wronskian, greens, kdv)
    #[arg(long)]
    suite: Option<String>,
    /// Add deterministic noise of this amplitude to the dressed potential
    /// before checking; a negative control that must fail
    #[arg(long)]
    perturb: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the dressed potential and bound states, emit CSV + report
    Construct(CommonArgs),
    /// Reconstruct snapshots along a time list and check evolution laws
    Evolve(CommonArgs),
    /// Sweep reflection/transmission amplitudes over a wavenumber range
    Scatter(CommonArgs),
    /// Solution-pair Green's function and the discrete resolvent ladder
    Greens(CommonArgs),
    /// Run the aggregated verification suite
    Verify(VerifyArgs),
}

fn init_threads() {
    if let Ok(v) = std::env::var("DRESSING_LAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                // ignore failures from double initialisation (tests)
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn run_common(
    args: &CommonArgs,
    f: impl Fn(&config::Validated, &std::path::Path) -> CliResult<Vec<PathBuf>>,
) -> CliResult<()> {
    let cfg = validate(&RunConfig::load(&args.config)?)?;
    std::fs::create_dir_all(&args.out)?;
    let written = f(&cfg, &args.out)?;
    if args.svg {
        svg::render_all(&written)?;
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn real_main() -> Result<i32, CliError> {
    init_threads();
    let cli = Cli::parse();
    match &cli.command {
        Command::Construct(a) => run_common(a, commands::construct::run)?,
        Command::Evolve(a) => run_common(a, commands::evolve::run)?,
        Command::Scatter(a) => run_common(a, commands::scatter::run)?,
        Command::Greens(a) => run_common(a, commands::greens_cmd::run)?,
        Command::Verify(a) => {
            let run_cfg = match &a.config {
                Some(path) => RunConfig::load(path)?,
                None => RunConfig::default(),
            };
            let cfg = validate(&run_cfg)?;
            std::fs::create_dir_all(&a.out)?;
            if a.svg {
                eprintln!("note: verify emits no CSV; --svg has no effect");
            }
            let all_pass =
                commands::verify::run(&cfg, &a.out, a.suite.as_deref(), a.perturb)?;
            if !all_pass {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
