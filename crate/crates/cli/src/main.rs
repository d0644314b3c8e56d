use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod report;

use commands::{Globals, OffsetArgs, Outcome};
use config::Target;
use error::{exit, CliError};

/// Ruled surfaces in Minkowski 3-space and their Mannheim offsets.
#[derive(Debug, Parser)]
#[command(name = "minkruled", version)]
struct Cli {
    /// Residual or certification tolerance.
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol: Option<f64>,
    /// Number of rulings sampled (overrides the config).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Finite-difference step; also forces finite differences on catalog surfaces.
    #[arg(long = "fd-step", global = true, allow_hyphen_values = true)]
    fd_step: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a surface and report its striction curve, drall and frame.
    Analyze { config: PathBuf },
    /// Build and certify a Mannheim offset, writing its configuration.
    Offset {
        config: PathBuf,
        /// Offset distance: a number or an expression in `s`.
        #[arg(long = "R", allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        theta0: f64,
        #[arg(long, value_parser = Target::parse)]
        target: Target,
        /// Parameter at which the angle equals theta0 (default: s = 0, clamped into the domain).
        #[arg(long, allow_hyphen_values = true)]
        anchor: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check theorems on a base surface and an offset.
    Verify {
        base: PathBuf,
        offset: PathBuf,
        /// Comma-separated subset of 4.1, 5.1, 5.2, cor, or `all`.
        #[arg(long, default_value = "all")]
        theorems: String,
    },
    /// Export a sampled surface as a Wavefront OBJ quad mesh.
    Mesh {
        config: PathBuf,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let g = Globals {
        tol: cli.tol,
        samples: cli.samples,
        fd_step: cli.fd_step,
    };
    g.validate()?;
    match cli.command {
        Command::Analyze { config } => commands::analyze(&config, &g),
        Command::Offset {
            config,
            r,
            theta0,
            target,
            anchor,
            out,
        } => {
            let args = OffsetArgs {
                config,
                r,
                theta0,
                target,
                anchor,
                out,
            };
            commands::offset(&args, &g)
        }
        Command::Verify {
            base,
            offset,
            theorems,
        } => {
            let theorems = commands::parse_theorems(&theorems)?;
            commands::verify(&base, &offset, &theorems, &g)
        }
        Command::Mesh {
            config,
            rows,
            cols,
            out,
        } => commands::mesh(&config, rows, cols, &out, &g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::INPUT as u8
            } else {
                exit::OK as u8
            });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.report.render());
            for w in outcome.report.warnings() {
                eprintln!("warning: {w}");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
