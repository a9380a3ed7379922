//! `multicond`: condition numbers, worst-case perturbations and perturbation
//! experiments for multiple eigenvalues of matrix pairs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use multicond::lab::Structure;
use multicond::linalg::random::Field;
use multicond::pencil::NamedBuilder;
use multicond::{Complex64, Error};

#[derive(Parser)]
#[command(name = "multicond", version, about = "Condition numbers of multiple generalized eigenvalues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the singular values of X1 Y1^H and the condition numbers kappa_i.
    Cond(CondArgs),
    /// Build the perturbation that attains kappa_i and check it.
    WorstCase(WorstCaseArgs),
    /// Run a random-perturbation experiment.
    Experiment(ExperimentArgs),
    /// Reproduce the nondefective three-case table.
    Table2(TableArgs),
    /// Reproduce the defective table.
    Table3(Table3Args),
    /// Write a named pair and its eigenvector blocks as matrix files.
    BuildPair(BuildPairArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Named pair: example1, example2-hermitian, example2-nonhermitian, defective-2x3.
    #[arg(long, value_name = "NAME", required_unless_present = "a", conflicts_with = "a")]
    pub builder: Option<NamedBuilder>,
    /// Matrix file holding A.
    #[arg(long, value_name = "FILE", requires = "b")]
    pub a: Option<PathBuf>,
    /// Matrix file holding B.
    #[arg(long, value_name = "FILE", requires = "a")]
    pub b: Option<PathBuf>,
    /// Treat (A, B) as Hermitian with B positive definite (verified).
    #[arg(long)]
    pub definite: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ClusterArgs {
    /// The multiple eigenvalue, e.g. 2, -1.5 or 1+2i. Defaults to a builder's planted value.
    #[arg(long, value_name = "Z", allow_hyphen_values = true)]
    pub lambda0: Option<Complex64>,
    /// Multiplicity r (number of Jordan blocks when --n1 > 1).
    #[arg(long, value_name = "R")]
    pub mult: Option<usize>,
    /// Jordan block size.
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Perturbation class: hermitian or general.
    #[arg(long, default_value = "general")]
    pub structure: Structure,
}

#[derive(Args)]
pub struct CondArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub cluster: ClusterArgs,
    /// Analyze an infinite eigenvalue (zero eigenvalue of (B, A)). With
    /// --definite, (B, A) is the pair checked for definiteness.
    #[arg(long, conflicts_with = "lambda0")]
    pub infinite: bool,
    /// Right eigenvector block X1 instead of extracting it.
    #[arg(long, value_name = "FILE", requires = "y1")]
    pub x1: Option<PathBuf>,
    /// Left eigenvector block Y1, normalized with X1 so that Y1^H B X1 = I.
    #[arg(long, value_name = "FILE", requires = "x1")]
    pub y1: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub paper_digits: bool,
}

#[derive(Args)]
pub struct WorstCaseArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub cluster: ClusterArgs,
    /// 1-based index of the condition number to attain.
    #[arg(long, short)]
    pub index: usize,
    /// Also solve the pair perturbed by eps (E, F) and report the measured deltas.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_name = "FILE")]
    pub out_e: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out_f: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub paper_digits: bool,
}

#[derive(Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = multicond::lab::DEFAULT_TRIALS)]
    pub trials: usize,
    /// Worker threads; 0 uses all cores. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Write the JSON report to FILE.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Print JSON instead of the text table.
    #[arg(long)]
    pub json: bool,
    /// Round table entries to three significant digits.
    #[arg(long)]
    pub paper_digits: bool,
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub cluster: ClusterArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Perturbation size; defaults to 1e-5, or 1e-6 for defective clusters.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Entry field of the random perturbations: real or complex.
    #[arg(long, default_value = "real")]
    pub field: Field,
    /// Write every trial's deltas to FILE as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Use E = F = 0 in every trial.
    #[arg(long, hide = true)]
    pub zero_perturbation: bool,
}

#[derive(Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct Table3Args {
    #[command(flatten)]
    pub table: TableArgs,
    /// Perturbation class: hermitian or general.
    #[arg(long, default_value = "general")]
    pub structure: Structure,
}

#[derive(Args)]
pub struct BuildPairArgs {
    #[arg(long, value_name = "NAME")]
    pub builder: NamedBuilder,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving a.txt, b.txt, x1.txt and y1.txt.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::InvalidInput(_) | Error::IndexOutOfRange { .. } => 2,
        Error::ClusterMismatch { .. } | Error::DefectiveCluster { .. } => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cond(args) => commands::cond(args),
        Command::WorstCase(args) => commands::worst_case(args),
        Command::Experiment(args) => commands::experiment(args),
        Command::Table2(args) => commands::table2(args),
        Command::Table3(args) => commands::table3(args),
        Command::BuildPair(args) => commands::build_pair(args),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
