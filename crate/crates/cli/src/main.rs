use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hjkit::model::{
    cmd_check, cmd_derive, cmd_involution, cmd_simulate, DeriveWhat, FieldChoice, ModelError, ModelFile, Report,
    Requirement, SimulateOptions, LIFT_TOL,
};
use hjkit::CheckOptions;

/// Hamilton-Jacobi residuals, Legendre maps and flows for higher-order
/// autonomous Lagrangians.
#[derive(Parser)]
#[command(name = "hjkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Sampling {
    /// Numeric-zero tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    samples: usize,
}

impl Sampling {
    fn options(&self) -> CheckOptions {
        CheckOptions { tol: self.tol, samples: self.samples, seed: self.seed, ..CheckOptions::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print Cartan forms, energy, fields, Legendre map and Hamiltonian.
    Derive {
        model: PathBuf,
        /// all, cartan, energy, field, legendre, hamiltonian or hamfield.
        #[arg(default_value = "all")]
        what: DeriveWhat,
    },
    /// Residuals and verdicts for a section, one-form or generating function.
    Check {
        model: PathBuf,
        candidate: String,
        #[command(flatten)]
        sampling: Sampling,
        /// Verdict needed for exit code 0: none, generalized or strict.
        #[arg(long, default_value = "generalized")]
        require: Requirement,
    },
    /// Integrate a field with fixed-step RK4.
    Simulate {
        model: PathBuf,
        /// lagrangian, hamiltonian or associated:NAME; defaults to the
        /// field associated with --lift when given.
        #[arg(long)]
        field: Option<FieldChoice>,
        /// Name of a [state] block.
        #[arg(long)]
        initial: String,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Compare the lift of the associated flow through NAME with the
        /// full dynamics.
        #[arg(long)]
        lift: Option<String>,
        #[arg(long, default_value_t = LIFT_TOL)]
        tol: f64,
        /// Trajectory CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Poisson brackets of the parameter functions of a complete family.
    Involution {
        model: PathBuf,
        family: String,
        #[command(flatten)]
        sampling: Sampling,
    },
}

fn load(path: &Path) -> Result<ModelFile, ModelError> {
    let src = std::fs::read_to_string(path).map_err(|e| ModelError::Usage(format!("{}: {}", path.display(), e)))?;
    ModelFile::parse(&src).map_err(|e| match e {
        ModelError::Syntax { .. } | ModelError::Expression { .. } | ModelError::Invalid(_) => {
            ModelError::Invalid(format!("{}: {}", path.display(), e))
        }
        other => other,
    })
}

fn run(cli: Cli) -> Result<Report, ModelError> {
    match cli.command {
        Command::Derive { model, what } => cmd_derive(&load(&model)?, what),
        Command::Check { model, candidate, sampling, require } => {
            cmd_check(&load(&model)?, &candidate, &sampling.options(), require)
        }
        Command::Simulate { model, field, initial, t0, t1, dt, lift, tol, out } => {
            let m = load(&model)?;
            let field = match (field, &lift) {
                (Some(f), _) => f,
                (None, Some(name)) => FieldChoice::Associated(name.clone()),
                (None, None) => FieldChoice::Lagrangian,
            };
            let rep = cmd_simulate(&m, &SimulateOptions { field, initial, t0, t1, dt, lift, tol })?;
            if let (Some(path), Some(csv)) = (out, &rep.csv) {
                std::fs::write(&path, csv).map_err(|e| ModelError::Usage(format!("{}: {}", path.display(), e)))?;
            }
            Ok(rep)
        }
        Command::Involution { model, family, sampling } => cmd_involution(&load(&model)?, &family, &sampling.options()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(rep) => {
            print!("{}", rep.render());
            ExitCode::from(rep.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
