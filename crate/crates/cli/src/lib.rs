//! Command-line front end: TOML problem configs in, fixed-schema CSV out.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use commands::Output;
pub use config::{Overrides, ProblemConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "specasym", version, about = "Spectra and spectral asymptotics of regularized ODE operators")]
pub struct Cli {
    /// Relative tolerance of the direct integration.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub lmin: Option<i64>,
    #[arg(long, global = true)]
    pub lmax: Option<i64>,
    /// Sector index used for the root ordering.
    #[arg(long, global = true)]
    pub kappa: Option<usize>,
    /// Anchor radius of the numbering disk in the t-plane.
    #[arg(long = "seed-R", global = true)]
    pub seed_r: Option<f64>,
    /// Worker threads for the parallel pipelines.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print a human summary to standard error.
    #[arg(long, global = true)]
    pub report: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the associated matrix F(x).
    Matrix {
        config: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        x: f64,
    },
    /// Locate eigenvalues l_min..l_max.
    Spectrum { config: PathBuf },
    /// Weight numbers of the located eigenvalues.
    Weights { config: PathBuf },
    /// Model constants c1, c2, chi and the predicted eigenvalues.
    Asymptotics { config: PathBuf },
    /// Eigenvalue differences of two problems sharing the coefficients from nu0 on.
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
        #[arg(long)]
        nu0: Option<usize>,
    },
    /// Birkhoff solutions and the remainder functionals at the given |rho|.
    Birkhoff {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [20.0, 50.0, 100.0])]
        rho: Vec<f64>,
    },
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            tol: self.tol,
            l_min: self.lmin,
            l_max: self.lmax,
            kappa: self.kappa,
            seed_radius: self.seed_r,
        }
    }
}

pub fn load(path: &Path) -> Result<ProblemConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    ProblemConfig::from_toml(&text)
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let o = cli.overrides();
    match &cli.command {
        Command::Matrix { config, x } => commands::cmd_matrix(&load(config)?, *x),
        Command::Spectrum { config } => commands::cmd_spectrum(&load(config)?, &o),
        Command::Weights { config } => commands::cmd_weights(&load(config)?, &o),
        Command::Asymptotics { config } => commands::cmd_asymptotics(&load(config)?, &o),
        Command::Compare { config_a, config_b, nu0 } => {
            commands::cmd_compare(&load(config_a)?, &load(config_b)?, *nu0, &o)
        }
        Command::Birkhoff { config, rho } => commands::cmd_birkhoff(&load(config)?, rho, &o),
    }
}
