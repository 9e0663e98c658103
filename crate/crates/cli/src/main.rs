//! `dirac-hardy`: runs the verifiers, sweeps and solver from the command line.
//!
//! Exit codes: 0 all checks pass, 1 a checked property fails, 2 configuration
//! error, 3 numerical breakdown.

mod commands;
mod error;
mod field_spec;
mod profile;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_hardy_core::operators::Sign;
use dirac_hardy_core::verification::InequalityId;

use crate::error::CliError;
use crate::profile::{GridOverrides, GridProfile};
use crate::report::write_atomic;

#[derive(Debug, Parser)]
#[command(name = "dirac-hardy", version, about = "Hardy-Dirac inequality checks and Neumann-series solves")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random field that does not set its own.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Grid preset.
    #[arg(long, global = true, env = "DIRAC_HARDY_GRID_PROFILE", default_value = "standard")]
    pub profile: GridProfile,
    /// Cartesian box half-width.
    #[arg(long, global = true)]
    pub half_width: Option<f64>,
    /// Cartesian points per axis (even).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub r_min: Option<f64>,
    #[arg(long, global = true)]
    pub r_max: Option<f64>,
    #[arg(long, global = true)]
    pub radial_nodes: Option<usize>,
    /// Write the JSON report here (atomically).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
}

impl Common {
    pub fn overrides(&self) -> GridOverrides {
        GridOverrides {
            half_width: self.half_width,
            n: self.n,
            r_min: self.r_min,
            r_max: self.r_max,
            radial_nodes: self.radial_nodes,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Sign {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Psi0,
    ExpLambda,
    Phi0Radial,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residuals of the Dirac and Pauli algebra identities.
    AlgebraCheck,
    /// Both sides of one inequality on one field.
    Verify {
        #[arg(long, value_parser = parse_id)]
        id: InequalityId,
        /// Field spec: a kind name, `key=value` text, or `@file`.
        #[arg(long, default_value = "gaussian-packet")]
        field: String,
        /// Extra `key=value` field parameters.
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
        /// Radial scalar potential spec for general-hip (text or `@file`).
        #[arg(long)]
        potential: Option<String>,
        /// Also evaluate the channel field embedded in the Cartesian box.
        #[arg(long)]
        cross_check: bool,
    },
    /// Hardy-Dirac ratios along the regularized extremal family.
    Sharpness {
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
        #[arg(long, value_delimiter = ',', default_value = "1,0.4,0.2,0.1,0.05")]
        deltas: Vec<f64>,
        /// Write the sweep table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// An inequality on the extremal member of a family.
    Equality {
        #[arg(long, value_parser = parse_id)]
        id: InequalityId,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
        /// Decay rate for exp-lambda; default 3√(ε²+m²).
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.01)]
        cutoff: f64,
    },
    /// Neumann-series solve of (H ± i)ψ = f.
    Solve {
        /// Potential spec (text or `@file`).
        #[arg(long)]
        potential: String,
        #[arg(long, default_value = "band-limited-random")]
        field: String,
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value = "plus")]
        sign: SignArg,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long, default_value_t = 2000)]
        max_terms: usize,
        /// Run the series even when the potential bound is not below 1.
        #[arg(long)]
        probe: bool,
        /// Write ψ as a binary field file.
        #[arg(long)]
        psi_out: Option<PathBuf>,
    },
    /// Symmetry defect of the two shifted solves.
    Symmetry {
        #[arg(long)]
        potential: String,
        #[arg(long, default_value = "band-limited-random")]
        field: String,
        /// Second field; defaults to the first kind with seed + 1.
        #[arg(long)]
        field2: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        mass: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Combine JSON reports into one.
    ReportMerge {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

fn parse_id(s: &str) -> Result<InequalityId, String> {
    s.parse().map_err(|e: dirac_hardy_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::run(&cli.command, &cli.common).and_then(|(report, summary)| {
        let json = report.to_json()?;
        if let Some(path) = &cli.common.out {
            write_atomic(path, json.as_bytes())?;
        }
        if cli.common.json {
            print!("{json}");
        } else {
            print!("{summary}");
        }
        Ok(report.passed)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => CliError::Assertion(String::new()).exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
