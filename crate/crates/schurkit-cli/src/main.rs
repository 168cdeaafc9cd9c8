//! `schurkit` command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or failed computation, 2 a checked
//! bound or identity was violated, 64 bad usage.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use schurkit::Partition;

use output::Format;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Compute(schurkit::Error),
    Output(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(s) => write!(f, "invalid input: {s}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Output(s) => write!(f, "output error: {s}"),
        }
    }
}

impl From<schurkit::Error> for CliError {
    fn from(e: schurkit::Error) -> Self {
        CliError::Compute(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "schurkit", version, about = "Schur transform and quantum method-of-types numerics")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write output to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct DN {
    /// Local dimension.
    #[arg(long)]
    pub d: usize,
    /// Number of qudits.
    #[arg(long)]
    pub n: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// dim Q and dim P for every λ in I_{d,n}.
    Dims(DN),
    /// Kostka numbers K_{λμ} for every weight μ with d entries.
    Kostka {
        #[arg(long)]
        d: usize,
        #[arg(long, value_parser = parse_partition)]
        lambda: Partition,
    },
    /// The Schur transform as a dense matrix plus its label codec.
    Schur(DN),
    /// The Clebsch-Gordan block for λ ⊗ (1).
    Cg {
        #[arg(long)]
        d: usize,
        #[arg(long, value_parser = parse_partition)]
        lambda: Partition,
    },
    /// Duality check on random (U, s) pairs.
    Verify {
        #[command(flatten)]
        dn: DN,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = schurkit::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Block decomposition of ρ^{⊗n}.
    Rho {
        #[arg(long)]
        n: usize,
        /// Diagonal density matrix, comma-separated probabilities.
        #[arg(long, value_parser = parse_probs, conflicts_with = "state", required_unless_present = "state")]
        r: Option<Probs>,
        /// Density matrix as a JSON MatrixDocument.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Spectrum estimation: exact distribution, seeded trials and failure rates.
    Spectrum {
        #[arg(long, value_parser = parse_probs)]
        r: Probs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated error thresholds.
        #[arg(long, value_parser = parse_probs_loose, default_value = "0.3")]
        delta: Probs,
    },
    /// Entanglement concentration on ψ^{⊗n} for a bipartite pure state.
    Concentrate {
        #[arg(long)]
        n: usize,
        /// State on d×d as a JSON MatrixDocument column of length d².
        #[arg(long)]
        state: Option<PathBuf>,
        /// Local dimension of a random state when no file is given.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Universal compression at a fixed rate.
    Compress {
        #[arg(long, value_parser = parse_probs)]
        r: Probs,
        #[arg(long)]
        n: u32,
        /// Rate in qubits per input.
        #[arg(long)]
        rate: f64,
    },
    /// Trace sandwich, typical mass and classical type-class bounds.
    Typebounds {
        #[arg(long, value_parser = parse_probs)]
        r: Probs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.3)]
        delta: f64,
    },
    /// S_n Fourier transform derived from the Schur transform.
    Qft {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = schurkit::DEFAULT_TOL)]
        tol: f64,
    },
    /// Generalized phase estimation on a state of (C^d)^{⊗n}.
    Gpe {
        #[command(flatten)]
        dn: DN,
        /// State as a JSON MatrixDocument column of length d^n.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = schurkit::DEFAULT_TOL)]
        tol: f64,
    },
    /// Normal form of U^{⊗n} for a channel isometry.
    Channel {
        /// JSON file {"d_b", "d_e", "isometry": MatrixDocument}.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn parse_partition(s: &str) -> Result<Partition, String> {
    s.parse::<Partition>().map_err(|e| e.to_string())
}

/// Comma-separated list of reals.
#[derive(Clone, Debug)]
pub struct Probs(pub Vec<f64>);

fn parse_probs_loose(s: &str) -> Result<Probs, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Probs)
}

fn parse_probs(s: &str) -> Result<Probs, String> {
    let v = parse_probs_loose(s)?.0;
    if v.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err("probabilities must lie in [0, 1]".into());
    }
    if (v.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err("probabilities must sum to 1".into());
    }
    Ok(Probs(v))
}

/// `SCHURKIT_DENSE_CAP` if set, else the library default.
fn dense_cap() -> Result<usize, CliError> {
    match std::env::var("SCHURKIT_DENSE_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Input(format!("SCHURKIT_DENSE_CAP={v:?} is not an integer"))),
        Err(_) => Ok(schurkit::schur_transform::DEFAULT_DENSE_CAP),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                ErrorKind::ValueValidation => ExitCode::from(1),
                _ => ExitCode::from(64),
            };
        }
    };
    let result = dense_cap().and_then(|cap| commands::run(&cli.command, cap)).and_then(|report| {
        let bytes = output::render(&report, cli.format)?;
        output::emit(&bytes, cli.out.as_deref())?;
        Ok(report.violated)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("schurkit: a checked bound or identity was violated");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("schurkit: {e}");
            ExitCode::from(1)
        }
    }
}
