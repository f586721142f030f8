mod commands;
mod config;
mod error;
mod figures;
mod staging;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{cmd_contour, cmd_run, ContourArgs, RunOverrides};
use crate::config::MethodChoice;
use crate::figures::{cmd_figure, FigureName, FigureOverrides};

/// Spectra of nonsymmetric correlated Wishart matrices C = A Bᵗ / T.
///
/// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
/// NSWISHART_THREADS caps the worker pool.
#[derive(Parser)]
#[command(name = "nswishart", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce the data of one figure (CSV, manifest, optional SVG).
    Figure {
        name: FigureName,
        /// Output directory [default: out/<name>]
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write SVG plots
        #[arg(long)]
        svg: bool,
        #[arg(long)]
        realizations: Option<usize>,
        /// Matrix dimension N
        #[arg(long)]
        n: Option<usize>,
        /// Sample length T [default: 2N]
        #[arg(long)]
        t: Option<usize>,
        /// Points per contour
        #[arg(long)]
        points: Option<usize>,
        /// Histogram bins
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Run an experiment described by a JSON config file.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        realizations: Option<usize>,
        /// Output directory [default: config output_dir, else out]
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: bool,
    },
    /// Print the support boundary for an η as CSV.
    Contour {
        /// η as JSON, e.g. '{"kind": "diagonal", "c": 0.25}' or '"zero"'
        #[arg(long)]
        eta: String,
        /// κ = N/T
        #[arg(long)]
        kappa: f64,
        #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
        method: MethodChoice,
        /// Dimension of η
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long, default_value_t = nswishart::analytics::DEFAULT_POINTS)]
        points: usize,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Figure {
            name,
            out,
            seed,
            svg,
            realizations,
            n,
            t,
            points,
            bins,
        } => cmd_figure(
            name,
            FigureOverrides {
                out,
                seed,
                realizations,
                n,
                t,
                points,
                bins,
                svg,
            },
        )
        .map(report_files),
        Command::Run {
            config,
            seed,
            realizations,
            out,
            svg,
        } => cmd_run(
            &config,
            RunOverrides {
                seed,
                realizations,
                out,
                svg,
            },
        )
        .map(report_files),
        Command::Contour {
            eta,
            kappa,
            method,
            n,
            points,
            out,
        } => cmd_contour(ContourArgs {
            eta,
            n,
            kappa,
            method,
            points,
            out,
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nswishart: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn report_files(paths: Vec<PathBuf>) {
    for p in paths {
        println!("{}", p.display());
    }
}
