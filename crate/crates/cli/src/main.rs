use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod expr;

/// Exit status for decided verdicts and clean suites.
const EXIT_DECIDED: u8 = 0;
/// Input errors, refused hypotheses and internal contradictions.
const EXIT_ERROR: u8 = 1;
/// Inconclusive or Marginal verdicts.
const EXIT_UNDECIDED: u8 = 2;
/// A suite row whose two routes disagree.
const EXIT_DISAGREEMENT: u8 = 3;

#[derive(Parser)]
#[command(name = "blocktoeplitz", version, about = "Hyponormality verdicts for block Toeplitz operators")]
pub struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct GlobalOpts {
    /// Relative PSD tolerance: λmin ≥ -tol·(1+‖X‖) is PSD
    #[arg(long, global = true, value_parser = positive_f64)]
    pub tol_psd: Option<f64>,

    /// Contraction tolerance: σmax(K(M)) ≤ 1+tol is contractive
    #[arg(long, global = true, value_parser = positive_f64)]
    pub tol_contract: Option<f64>,

    /// Grid size for sup norms on the circle
    #[arg(long, global = true, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(8..))]
    pub grid: u64,

    /// Output format (json for verdicts, csv for suites by default)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
pub enum Command {
    /// Decide hyponormality through the model-space criterion
    CheckHyponormal {
        /// Symbol JSON file or scalar expression
        symbol: String,
    },
    /// Test k-hyponormality on a finite window
    CheckK {
        symbol: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        /// Window size in blocks (default: twice the natural window, at least 16)
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        window: Option<u64>,
    },
    /// Test hyponormality of the square on a finite window
    CheckSquare {
        symbol: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        window: Option<u64>,
    },
    /// Normal / analytic / neither for symbols with a coprime co-analytic part
    Classify { symbol: String },
    /// Membership of [[z̄, φ],[ψ, z̄]] in the normal completion families
    CompleteUstar {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
        #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
        window: u64,
    },
    /// Check [[z, φ],[ψ, z̄]] for a hyponormal completion
    NoCompletion {
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
        #[arg(long, allow_hyphen_values = true)]
        psi: String,
    },
    /// Run a seeded randomized suite, one row per case
    Suite {
        #[arg(value_enum)]
        name: SuiteName,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random cases (suite default if omitted)
        #[arg(long)]
        count: Option<usize>,
        /// Window for window-based checks
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
        window: u64,
    },
    /// Export matrices, witnesses and sweeps for plotting
    Export {
        #[command(subcommand)]
        what: ExportWhat,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    /// Model verdict vs exact self-commutator
    OracleEquivalence,
    /// Compression of polynomials vs P(M)
    ModelIdentity,
    /// Completion family grid plus random pairs outside the families
    CompletionFamilies,
    /// Normal / analytic classifier on random matrix symbols
    Classifier,
    /// [[z, φ],[ψ, z̄]] candidates
    Tz,
}

#[derive(Subcommand)]
pub enum ExportWhat {
    /// The model matrix M for the given zeros
    Model {
        /// Comma-separated zeros, repeated for multiplicity (e.g. "0,0" or "0.5i,0.3")
        #[arg(long, allow_hyphen_values = true)]
        zeros: String,
    },
    /// K(M), the defect I - K(M)*K(M) and the model data for a symbol
    Defect { symbol: String },
    /// Minimum eigenvalue and witness of a k-hyponormality window
    Witness {
        symbol: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
        window: u64,
    },
    /// Minimum eigenvalues of k-hyponormality windows
    Sweep {
        symbol: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        windows: Vec<usize>,
    },
    /// Residual of the non-Toeplitz normal completion against the window size
    NonToeplitz {
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
        windows: Vec<usize>,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("tolerance must be positive".into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_DECIDED });
        }
    };
    match commands::run(cli.command, &cli.opts) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
