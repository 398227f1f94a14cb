//! Command-line configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperwave_core::Branch;

use crate::format::Format;

#[derive(Debug, Parser)]
#[command(name = "hyperwave", version, about = "Bound states, critical strengths and scattering for U(ξ) = C(tanh ξ + γ) sech²ξ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunConfig,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Range parameter λ; positions are in units of 1/λ, energies of E₀.
    #[arg(long = "lambda", global = true, default_value_t = 1.0)]
    pub lambda_scale: f64,
    /// Basis truncation N of the tridiagonal matrix.
    #[arg(long = "N", global = true, default_value_t = 4000)]
    pub truncation: usize,
    /// μ-regularization used for zero-energy limits.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub delta: f64,
    /// Tolerance (extrapolation switch for `critical`, oracle agreement for `verify`).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            lambda_scale: 1.0,
            truncation: 4000,
            delta: 1e-7,
            tol: None,
            format: Format::Csv,
            out: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => Branch::Plus,
            BranchArg::Minus => Branch::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Strength {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Dimensionless strength C = V₀/E₀.
    #[arg(long, allow_negative_numbers = true)]
    pub strength: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sample the potential: `x,U`.
    Potential {
        #[command(flatten)]
        p: Strength,
        #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true, default_values_t = [-6.0, 6.0])]
        range: Vec<f64>,
        #[arg(long, default_value_t = 241)]
        count: usize,
    },
    /// Strengths C for which a fixed energy is an eigenvalue: `epsilon,gamma,k,C`.
    Pspec {
        #[arg(long, allow_negative_numbers = true)]
        epsilon: f64,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        /// Values per sign of C.
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
        branch: BranchArg,
        /// Also write the matrix T_γ as JSON {"diag", "off"}.
        #[arg(long, value_name = "PATH")]
        dump_matrix: Option<PathBuf>,
    },
    /// Critical strengths Ĉ_n(γ): `gamma,side,n,C_hat`.
    Critical {
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        /// Entries per side.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, value_enum, default_value_t = BranchArg::Minus)]
        branch: BranchArg,
    },
    /// Bound-state energies: `C,gamma,n,epsilon,mu`.
    Espec {
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        /// Required unless `--map` is given.
        #[arg(long, allow_negative_numbers = true)]
        strength: Option<f64>,
        /// Trace energy-vs-strength curves over the `--range` energy window instead.
        #[arg(long)]
        map: bool,
        #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true)]
        range: Option<Vec<f64>>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Curves per sign of C for `--map`.
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
        branch: BranchArg,
    },
    /// Number of bound states: `C,gamma,count`.
    Count {
        #[command(flatten)]
        p: Strength,
    },
    /// Normalized bound-state wavefunction: `x,psi` plus a JSON sidecar.
    Wavefunction {
        #[command(flatten)]
        p: Strength,
        /// Bound state index, 0 for the ground state.
        #[arg(long, default_value_t = 0)]
        state: usize,
        #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], allow_negative_numbers = true, default_values_t = [-10.0, 10.0])]
        range: Vec<f64>,
        #[arg(long, default_value_t = 401)]
        count: usize,
    },
    /// Reflection and transmission probabilities: `epsilon,R2,T2`.
    Scatter {
        #[command(flatten)]
        p: Strength,
        #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [0.05, 50.0])]
        range: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    /// Cross-check (C, γ) against (−C, −γ) and the shooting oracle (JSON report).
    Verify {
        #[command(flatten)]
        p: Strength,
    },
}
