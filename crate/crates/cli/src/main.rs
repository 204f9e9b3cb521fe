use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use polyharm_cli::{exit_code, run, Command, RunConfig};

const EXIT_CODES: &str = "Exit codes:
  0  success
  1  unexpected internal error
  2  invalid command line or config file (line and key are reported)
  3  invalid domain or input data (radii outside the ball, bad modes, unreadable samples, ...)
  4  numerical failure (zero trace, derivative order too high for the profile fit, non-finite scaled data)
  5  I/O failure (missing config or sample file, unwritable output directory)
  6  boundary case C*R = 1 in `diverge`";

#[derive(Parser)]
#[command(name = "polyharm", version, about = "Polyharmonic interpolation on the ball", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Run configuration (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (default: `output` from the config, else `./out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; 0 picks the number of CPUs.
    #[arg(long, global = true, env = "POLYHARM_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Table of d_k and cumulative mode counts.
    Modes,
    /// Build the interpolant and check the interpolation conditions.
    Interpolate,
    /// Error-bound sweep over orders with general knots.
    ReportT1,
    /// Decay fits on the knot spheres and the ball-norm series.
    ReportT2,
    /// Partial sums of the geometric example.
    Diverge,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Modes => Command::Modes,
            Cmd::Interpolate => Command::Interpolate,
            Cmd::ReportT1 => Command::ReportT1,
            Cmd::ReportT2 => Command::ReportT2,
            Cmd::Diverge => Command::Diverge,
        }
    }
}

fn main_inner(cli: Cli) -> anyhow::Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("starting thread pool")?;
    }
    let path = cli.config.ok_or_else(|| polyharm_cli::ConfigError {
        line: None,
        key: None,
        message: "--config is required".into(),
    })?;
    let config = RunConfig::load(&path)?;
    let out = cli
        .out
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let manifest = run(cli.command.into(), &config, &out)?;
    for f in &manifest.outputs {
        println!("{}", out.join(&f.file).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
