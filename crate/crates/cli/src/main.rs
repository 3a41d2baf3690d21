mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use gleason_core::bases::BasisFamily;
use gleason_core::Dims;

use crate::io::{render, write_artifact, CliError, Envelope, Meta, Outcome};

#[derive(Parser)]
#[command(name = "gleason", version, about = "Frame functions on product states: bases, oracles, reconstruction and entangled subspaces")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write the JSON artifact here, then read it back and re-validate it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisKind {
    Product,
    Mixed,
    QubitBlock,
    Reversed,
}

impl BasisKind {
    pub fn family(self) -> BasisFamily {
        match self {
            BasisKind::Product => BasisFamily::Product,
            BasisKind::Mixed => BasisFamily::Mixed,
            BasisKind::QubitBlock => BasisFamily::QubitBlock,
            BasisKind::Reversed => BasisFamily::Reversed,
        }
    }

    pub fn name(self) -> &'static str {
        self.family().name()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleKind {
    /// `⟨p|p⟩`, weight N.
    BornIdentity,
    /// `⟨p|T|p⟩` for a seeded random Hermitian T.
    BornRandom,
    /// `g(a) ⟨u|u⟩` with `g = w/2 + 0.3 p_z³` on a qubit first factor.
    QubitProduct,
    /// Frame function on product bases only.
    Counterexample,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SubspaceMethod {
    Vandermonde,
    Random,
}

impl SubspaceMethod {
    pub fn name(self) -> &'static str {
        match self {
            SubspaceMethod::Vandermonde => "vandermonde",
            SubspaceMethod::Random => "random",
        }
    }
}

#[derive(Args)]
pub struct OracleArgs {
    /// Oracle description file; overrides the other oracle flags.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OracleKind::BornIdentity)]
    pub oracle: OracleKind,
    #[arg(long)]
    pub dims: Option<Dims>,
    /// Weight of qubit-product and counterexample oracles (default 1 and N).
    #[arg(long)]
    pub weight: Option<f64>,
    #[arg(long, default_value = "modulus-weighted-conjugate")]
    pub psi: String,
}

#[derive(Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 100)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Convergence threshold on the per-sweep gain.
    #[arg(long, default_value_t = 1e-12)]
    pub search_tol: f64,
    /// Overlap above which a product vector counts as found.
    #[arg(long, default_value_t = 1.0 - 1e-6)]
    pub found: f64,
    /// Overlap below which the subspace is judged entangled.
    #[arg(long, default_value_t = 1.0 - 1e-3)]
    pub not_found: f64,
    #[arg(long, default_value_t = 100)]
    pub min_restarts: usize,
    /// Skip the exact test on (2,2) and (2,3) subspaces of dimension at most 2.
    #[arg(long)]
    pub no_exact: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded unentangled basis.
    GenBasis {
        #[arg(long, value_enum, default_value_t = BasisKind::Product)]
        kind: BasisKind,
        #[arg(long)]
        dims: Dims,
        /// Block sizes for qubit-block bases on (2,n).
        #[arg(long, value_delimiter = ',')]
        partition: Option<Vec<usize>>,
    },
    /// Check that a basis file is orthonormal and unentangled.
    CheckBasis {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Recover the block structure of an unentangled basis of C^2 ⊗ C^n.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Sum an oracle over sampled bases of one family.
    FrameVerify {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, value_enum, default_value_t = BasisKind::Product)]
        family: BasisKind,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Recover Born coefficients from oracle values on the probe grid.
    Reconstruct {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Asymmetry and consistency tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Random product states for the consistency check.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Least-squares Hermitian fit residual of an oracle.
    Residual {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
    /// Product-basis frame function that fails on another unentangled basis.
    Counterexample {
        #[arg(long, default_value = "3,3")]
        dims: Dims,
        /// Defaults to N.
        #[arg(long)]
        weight: Option<f64>,
        #[arg(long, default_value = "modulus-weighted-conjugate")]
        psi: String,
        /// Product bases checked.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Reversed-structure bases searched for a witness.
        #[arg(long, default_value_t = 200)]
        tries: usize,
        #[arg(long, default_value_t = 2000)]
        fit_samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Largest dimension of a subspace with no product vector.
    EntangledDim {
        #[arg(long)]
        dims: Dims,
    },
    /// Build an entangled subspace with a certificate.
    EntangledSubspace {
        #[arg(long)]
        dims: Dims,
        #[arg(long, value_enum, default_value_t = SubspaceMethod::Vandermonde)]
        method: SubspaceMethod,
        /// Distinct evaluation points, one per degree class.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        points: Option<Vec<f64>>,
        /// Dimension of a random subspace (default: the bound).
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Look for a product vector in a subspace.
    FindProduct {
        /// Certificate or subspace file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Required for bare subspace files.
        #[arg(long)]
        dims: Option<Dims>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Nonnegative unentangled frame function on (2,3) that is not Born.
    #[command(name = "demo-theorem3")]
    DemoTheorem3 {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 2000)]
        fit_samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GenBasis { .. } => "gen-basis",
            Command::CheckBasis { .. } => "check-basis",
            Command::Decompose { .. } => "decompose",
            Command::FrameVerify { .. } => "frame-verify",
            Command::Reconstruct { .. } => "reconstruct",
            Command::Residual { .. } => "residual",
            Command::Counterexample { .. } => "counterexample",
            Command::EntangledDim { .. } => "entangled-dim",
            Command::EntangledSubspace { .. } => "entangled-subspace",
            Command::FindProduct { .. } => "find-product",
            Command::DemoTheorem3 { .. } => "demo-theorem3",
        }
    }

    fn run(&self, seed: u64) -> Result<Outcome, CliError> {
        match self {
            Command::GenBasis { kind, dims, partition } => {
                commands::gen_basis(dims, *kind, partition.as_deref(), seed)
            }
            Command::CheckBasis { input, tol } => commands::check_basis(input, *tol),
            Command::Decompose { input, tol } => commands::decompose(input, *tol),
            Command::FrameVerify { oracle, family, samples, tol } => {
                commands::frame_verify(oracle, *family, *samples, *tol, seed)
            }
            Command::Reconstruct { oracle, tol, samples } => {
                commands::reconstruct_cmd(oracle, *tol, *samples, seed)
            }
            Command::Residual { oracle, samples } => commands::residual(oracle, *samples, seed),
            Command::Counterexample { dims, weight, psi, samples, tries, fit_samples, tol } => {
                commands::counterexample(dims, *weight, psi, *samples, *tries, *fit_samples, *tol, seed)
            }
            Command::EntangledDim { dims } => commands::entangled_dim(dims),
            Command::EntangledSubspace { dims, method, points, dim, search } => {
                commands::entangled_subspace(dims, *method, points.as_deref(), *dim, search, seed)
            }
            Command::FindProduct { input, dims, search } => {
                commands::find_product(input, dims.as_ref(), search, seed)
            }
            Command::DemoTheorem3 { samples, fit_samples, tol } => {
                commands::demo_qubit_product(*samples, *fit_samples, *tol, seed)
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let outcome = cli.command.run(cli.seed)?;
    let envelope = Envelope {
        meta: Meta::new(cli.command.name(), cli.seed),
        result: outcome.result,
    };
    if let Some(path) = &cli.out {
        write_artifact(path, &envelope, outcome.check.as_ref())?;
    }
    match cli.format {
        Format::Text => print!("{}", outcome.text),
        Format::Json => print!("{}", render(&envelope)?),
    }
    Ok(outcome.status.code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
