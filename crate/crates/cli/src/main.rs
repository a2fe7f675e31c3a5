//! `qcq`: capacitance-network analysis and coupler layout design.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcq_core::QcqError;

#[derive(Parser, Debug)]
#[command(
    name = "qcq",
    version,
    about = "Qubit-coupler-qubit capacitance analysis and design"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energies, A, B and a g(ω_c)/β(ω_c) sweep of a network file.
    Analyze {
        network: PathBuf,
        /// Qubit frequency, GHz.
        #[arg(long = "wq")]
        omega_q: f64,
        /// Coupler sweep `lo:hi:n` in GHz.
        #[arg(long, value_parser = commands::parse_sweep)]
        sweep: Option<commands::SweepArg>,
        /// Output directory for report.json and sweep.csv.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Whether g = 0 is reachable in the dispersive regime.
    CheckZero {
        network: PathBuf,
        #[arg(long = "beta-s")]
        beta_s: f64,
        /// Print the verdict as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Upper bound of the turned-on coupling.
    Bound {
        /// Frequency ceiling, GHz.
        #[arg(long = "omega-l")]
        omega_l: Option<f64>,
        #[arg(long = "beta-s")]
        beta_s: f64,
        /// Qubit frequencies (GHz) for estimates through the qubit frequency.
        #[arg(long = "omega-q", num_args = 1..)]
        omega_q: Vec<f64>,
        /// Use the exact coefficient 2f*/(x*y*) instead of 0.187.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        json: bool,
    },
    /// Capacitances realising a design spec.
    Design {
        spec: PathBuf,
        /// Output directory for report.json and per-sign sweep CSVs.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare the coupling formula with a spectral oracle.
    Verify {
        network: PathBuf,
        #[arg(long, default_value = "nm")]
        method: String,
        /// Qubit (or lone element) frequency, GHz.
        #[arg(long = "wq", default_value_t = commands::DEFAULT_OMEGA_Q)]
        omega_q: f64,
        /// Coupler sweep `lo:hi:n` in GHz.
        #[arg(long, value_parser = commands::parse_sweep)]
        sweep: Option<commands::SweepArg>,
        /// Dispersive threshold of the checked rows.
        #[arg(long = "beta-min", default_value_t = 10.0)]
        beta_min: f64,
        /// Optional directory for verify.json.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Core(QcqError),
    Io(String),
    /// A feasibility verdict came out negative.
    Infeasible(String),
    /// Output produced, but a check failed its tolerance.
    CheckFailed(String),
}

impl From<QcqError> for CliError {
    fn from(e: QcqError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::CheckFailed(_) => 1,
            CliError::Infeasible(_) => 3,
            CliError::Core(e) => match e.root() {
                QcqError::Parse(_)
                | QcqError::InvalidParameter(_)
                | QcqError::InvalidNetwork(_)
                | QcqError::InvalidTopology(_)
                | QcqError::UnknownNode(_)
                | QcqError::UnknownStrategy { .. }
                | QcqError::Domain(_) => 2,
                QcqError::Infeasible { .. } => 3,
                _ => 4,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::CheckFailed(m) => f.write_str(m),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze {
            network,
            omega_q,
            sweep,
            output,
        } => commands::analyze(&network, omega_q, sweep, &output),
        Command::CheckZero {
            network,
            beta_s,
            json,
        } => commands::check_zero(&network, beta_s, json),
        Command::Bound {
            omega_l,
            beta_s,
            omega_q,
            exact,
            json,
        } => commands::bound(omega_l, beta_s, &omega_q, exact, json),
        Command::Design { spec, output } => commands::design(&spec, &output),
        Command::Verify {
            network,
            method,
            omega_q,
            sweep,
            beta_min,
            output,
        } => commands::verify(
            &network,
            &method,
            omega_q,
            sweep,
            beta_min,
            output.as_deref(),
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
