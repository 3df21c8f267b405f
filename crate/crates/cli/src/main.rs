//! `qmask`: build and check Hurwitz-Radon families and maskers, analyze state
//! sets, and rerun the reproduction reports.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Format, RunConfig};
use output::Status;

#[derive(Parser, Debug)]
#[command(name = "qmask", version, about = "Hurwitz-Radon maskers and their numerical certificates")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every sampled quantity.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Primary tolerance of the command's check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `key = value` file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Composite dimension cap for dense matrices.
    #[arg(long, global = true)]
    max_dim: Option<usize>,
    /// Record wall time in reports (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hurwitz-Radon families.
    #[command(subcommand)]
    Hr(HrCommand),
    /// Masker isometries.
    #[command(subcommand)]
    Mask(MaskCommand),
    /// Entanglement and imaginarity measures.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// Finite state sets.
    #[command(subcommand)]
    Ic(IcCommand),
    /// Reproduction reports.
    Repro(ReproArgs),
}

#[derive(Subcommand, Debug)]
enum HrCommand {
    /// Build `--count` anticommuting unitaries of dimension `--dim`.
    Gen {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        real: bool,
    },
    /// Check the relations of a family stored as JSON.
    Verify { file: PathBuf },
    /// Table of minimal dimensions for d = 2..=max-d.
    Kappa {
        #[arg(long, default_value_t = 33)]
        max_d: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MaskerKind {
    Canonical,
    Magic,
    Spectrum,
    Qubit,
    Phase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SetKind {
    Real,
    Complex,
    Phase,
    Constrained,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Side {
    Both,
    A,
}

#[derive(Subcommand, Debug)]
enum MaskCommand {
    /// Construct a masker isometry of the given kind.
    Build {
        #[arg(long, value_enum)]
        kind: MaskerKind,
        /// Input dimension.
        #[arg(long)]
        d: Option<usize>,
        /// Local dimension (canonical; minimal when omitted).
        #[arg(long)]
        m: Option<usize>,
        /// Real-orthogonal family.
        #[arg(long)]
        real: bool,
        /// Spectrum as `lambda:multiplicity` pairs, comma separated.
        #[arg(long)]
        spectrum: Option<String>,
        /// Qubit masker eigenvalues, comma separated.
        #[arg(long)]
        mu: Option<String>,
        /// Qubit masker signs (+1/-1), searched for when omitted.
        #[arg(long, allow_hyphen_values = true)]
        signs: Option<String>,
    },
    /// Sample a state family and compare the marginals with the fixed ones.
    Verify {
        masker: PathBuf,
        #[arg(long, value_enum, default_value_t = SetKind::Real)]
        set: SetKind,
        #[arg(long)]
        n: Option<usize>,
        /// Amplitude profile for `--set phase` (uniform when omitted).
        #[arg(long)]
        profile: Option<String>,
        /// Which marginals must stay fixed for the check to pass.
        #[arg(long, value_enum, default_value_t = Side::Both)]
        side: Side,
    },
    /// Recover the HR families behind a masker.
    ExtractHr { masker: PathBuf },
}

#[derive(Subcommand, Debug)]
enum MeasureCommand {
    /// Robustness of imaginarity of a density matrix.
    Roi { state: PathBuf },
    /// Entanglement cost of masking for d = 2..=max-d.
    Table {
        #[arg(long, default_value_t = 17)]
        max_d: usize,
    },
    /// `(imaginarity, concurrence)` pairs against the closed curve.
    Maskcon {
        #[arg(long)]
        masker: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum IcCommand {
    /// Span dimension, Bloch affine dimension and a separating observable.
    Check { set: PathBuf },
    /// Weighted design test.
    Design {
        set: PathBuf,
        #[arg(long, default_value_t = 2)]
        t: u32,
    },
    /// Qubit disk criterion.
    Disk { set: PathBuf },
    /// Built-in fixtures.
    Fixtures {
        #[arg(long, value_parser = ["sic2", "mub2", "mub3", "basis2", "basis3", "basis4"])]
        name: String,
    },
    /// Triple product of the three phase-rotated states.
    Triple {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        c0_sq: f64,
    },
    /// Grid search for a common zero of the three cosine constraints.
    Obstruction {
        #[arg(long, default_value_t = 3)]
        dim_prime: usize,
        #[arg(long, default_value_t = 1)]
        step: u32,
    },
    /// Look for non-phase states that the phase masker still hides.
    Conjecture {
        /// Amplitude profile, comma separated.
        #[arg(long)]
        profile: String,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportName {
    Entmask,
    Maskcon,
    #[value(name = "counterexample-d2")]
    CounterexampleD2,
    HideNotMask,
    Bott,
    All,
}

#[derive(Args, Debug)]
struct ReproArgs {
    #[arg(value_enum)]
    name: ReportName,
    #[arg(long, default_value_t = 17)]
    d_max: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long)]
    n: Option<usize>,
}

fn resolve(global: &Global) -> anyhow::Result<RunConfig> {
    let mut config = RunConfig::default();
    if let Some(path) = &global.config {
        config.apply_file(path)?;
    }
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if let Some(tol) = global.tol {
        config.apply("tol", &tol.to_string())?;
    }
    if global.format.is_some() {
        config.format = global.format;
    }
    if global.out.is_some() {
        config.out = global.out.clone();
    }
    if let Some(max_dim) = global.max_dim {
        config.max_dim = max_dim;
    }
    config.timing |= global.timing;
    qmask_core::matrix::set_max_dimension(config.max_dim);
    Ok(config)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    use qmask_core::Error;
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::DimensionLimit { .. } | Error::NonFinite) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(&cli.global).and_then(|config| {
        let output = commands::run(&cli.command, &config)?;
        output::emit(&output, &config)?;
        Ok(output.status)
    });
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::ClaimFailed) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
