//! `crlab`: batch verification runs over meshes, orders and spaces.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or configuration
//! error.

mod commands;
mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_p_list, PList, FormatArg, MeshArgs, SpaceArg};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Core(#[from] crlab_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Failed(_) | CliError::Core(_) => 1,
        }
    }
}

/// Rendered report plus whether any check failed.
pub struct Outcome {
    pub text: String,
    pub failed: bool,
}

#[derive(Debug, Parser)]
#[command(name = "crlab", version, about = "Kernel, inf-sup and identity checks for Crouzeix-Raviart Stokes pairs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH", global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "CRLAB_THREADS", global = true)]
    threads: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    #[command(flatten)]
    mesh: MeshArgs,
    /// Polynomial orders: `5`, `5,7` or `3-7`.
    #[arg(long = "p", value_name = "LIST", value_parser = parse_p_list)]
    p: Option<PList>,
    /// Tolerance override NAME=VALUE (eps_angle, rank_safety, zero_mode,
    /// quad_degree); repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every closed-form identity against an independent computation.
    VerifyIdentities {
        /// Largest Jacobi degree in the integral table.
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        /// Random triangles per geometric identity.
        #[arg(long, default_value_t = 100)]
        triangles: usize,
        /// Test hook: flip the sign of one closed-form integral.
        #[arg(long, hide = true, value_name = "INTEGRAL")]
        inject_fault: Option<String>,
    },
    /// Critical points and pressure kernel dimensions of every nodal patch.
    AnalyzePatch {
        #[command(flatten)]
        common: Common,
        /// Which spaces to report.
        #[arg(long, value_enum, default_value = "both")]
        space: SpaceArg,
    },
    /// Factorization check of the chain matrices (odd p only).
    ChainMatrices {
        #[command(flatten)]
        common: Common,
    },
    /// Discrete inf-sup constants.
    Infsup {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "cr")]
        space: SpaceArg,
        /// Velocity norm: broken seminorm or full broken norm.
        #[arg(long, value_enum, default_value = "seminorm")]
        norm: commands::NormArg,
    },
    /// Solve the discrete Stokes problem.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "cr")]
        space: SpaceArg,
        /// Right-hand side.
        #[arg(long, value_enum, default_value = "manufactured")]
        rhs: commands::RhsArg,
        /// Solve even if the pair has spurious pressure modes.
        #[arg(long)]
        force: bool,
        /// Write velocity samples as a legacy VTK point file.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let format = cli.format.into();
    match cli.command {
        Command::VerifyIdentities { n_max, triangles, inject_fault } => {
            commands::verify_identities(n_max, triangles, cli.seed, inject_fault.as_deref(), format)
        }
        Command::AnalyzePatch { common, space } => {
            let p = common.p.map_or_else(|| vec![5], |p| p.0);
            commands::analyze_patch(&common.mesh, &p, &common.tol, space, format)
        }
        Command::ChainMatrices { common } => {
            let p = common.p.map_or_else(|| vec![5], |p| p.0);
            commands::chain_matrices(&common.mesh, &p, &common.tol, format)
        }
        Command::Infsup { common, space, norm } => {
            let p = common.p.map_or_else(|| vec![5, 7], |p| p.0);
            commands::infsup(&common.mesh, &p, &common.tol, space, norm, format)
        }
        Command::Solve { common, space, rhs, force, dump } => {
            let p = common.p.map_or_else(|| vec![5], |p| p.0);
            commands::solve(&common.mesh, &p, &common.tol, space, rhs, force, dump.as_deref(), format)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(outcome) => {
            let written = match &out {
                Some(path) => fs::write(path, &outcome.text),
                None => std::io::stdout().write_all(outcome.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: writing report: {e}");
                return ExitCode::from(2);
            }
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
