use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "smech", version, about = "Mechanics on supermanifolds: Tulczyjew dynamics, S-curve integration and checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file
    pub model: PathBuf,
    /// Apply the model's constraint block
    #[arg(long)]
    pub constrained: bool,
}

#[derive(Debug, Args)]
pub struct RunConfig {
    /// Number of Grassmann generators of the parametrisation Λ_q
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub t1: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Initial jets, solution constants or parameter overrides, e.g.
    /// `--init psi_p=z1 --init dx=0.5 --init m=2`
    #[arg(long = "init", value_name = "SYMBOL=VALUE")]
    pub init: Vec<String>,
    /// Trajectory output file
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trajectory encoding; `text` prints the summary only
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Momentum pullbacks, phase generators, Euler–Lagrange equations and normal form
    Tulczyjew {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Euler–Lagrange equations and their normal form
    El {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Integrate the equations of motion (or sample the closed-form solution)
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunConfig,
        /// Integrate the flow of this field instead of the Euler–Lagrange equations
        #[arg(long)]
        field: Option<String>,
        /// Sample the model's closed-form solution instead of integrating
        #[arg(long)]
        solution: bool,
        /// Phase-space function whose drift along the solution is reported
        #[arg(long = "constant", value_name = "EXPR")]
        constants: Vec<String>,
    },
    /// Check that a trajectory solves the model's equations
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Trajectory file (.csv or .json)
        trajectory: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Verify against the flow of this field
        #[arg(long)]
        field: Option<String>,
    },
    /// Symbolic symmetry check of a field, optionally with a numeric check along a trajectory
    Symcheck {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        field: String,
        /// Trajectory for the numeric check
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Apply a change of parametrisation to a trajectory
    Reparam {
        /// Trajectory file (.csv or .json)
        trajectory: PathBuf,
        /// `reparam { z1 = ..., ... }` file
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check that a phase-space function is constant along a trajectory
    Constants {
        #[command(flatten)]
        model: ModelArgs,
        trajectory: PathBuf,
        #[arg(long = "expr", value_name = "EXPR", required = true)]
        exprs: Vec<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}
