//! `spindiff` command-line front end.
//!
//! Exit codes: 0 success, 2 input or config error, 3 numerical failure,
//! 4 non-identifiable fit.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod data;
pub mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::RunConfig;
pub use data::{MeasuredData, Table};
pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "spindiff", version, about = "Nuclear spin diffusion out of a quantum dot")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Suppress progress and summary output on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured protocol for one diffusion coefficient.
    Simulate {
        /// Diffusion coefficient, cm²/s; overrides `[solver] d_cm2s`.
        #[arg(long)]
        d: Option<f64>,
    },
    /// Normalized decay curves for several diffusion coefficients.
    Sweep {
        /// Comma-separated coefficients, cm²/s; overrides `[solver] d_list_cm2s`.
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<f64>>,
    },
    /// Fit the diffusion coefficient to a measured decay.
    FitD {
        /// Measured CSV (`delay_s,value,sigma`).
        data: PathBuf,
    },
    /// Fit `offset + A(1 - exp(-t/tau))` to a measured build-up curve.
    FitRise {
        /// Measured CSV (`delay_s,value,sigma`).
        data: PathBuf,
    },
    /// Convert between Overhauser shift, polarization degree and Overhauser field.
    Convert {
        #[arg(allow_negative_numbers = true)]
        value: f64,
        #[arg(long, value_enum)]
        from: Quantity,
        #[arg(long, value_enum)]
        to: Quantity,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Overhauser shift, µeV.
    Ohs,
    /// Nuclear polarization degree, -1..1.
    Polarization,
    /// Overhauser field, T (needs `g_e_abs`).
    Field,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match commands::dispatch(cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
