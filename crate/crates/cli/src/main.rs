//! `ctxobs`: batch computations over contextual observables on matrix
//! algebras. Inputs are JSON files (see the schemas directory at the
//! repository root); every run emits a deterministic report embedding its
//! seed and tolerance profile.

mod commands;
mod config;
mod errors;
mod formats;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{OutputFormat, RunConfig, TolProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AspectModeArg {
    Upper,
    Lower,
}

impl AspectModeArg {
    pub fn aspect(self) -> ctxobs_core::presheaf::AspectMode {
        match self {
            Self::Upper => ctxobs_core::presheaf::AspectMode::Upper,
            Self::Lower => ctxobs_core::presheaf::AspectMode::Lower,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Upper => "upper",
            Self::Lower => "lower",
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ctxobs",
    version,
    about = "Contextual observables over finite-dimensional matrix algebras",
    propagate_version = true
)]
struct Cli {
    /// Seed for every randomized construction in the run.
    #[arg(long, global = true, default_value_t = ctxobs_core::acceptance::DEFAULT_SEED)]
    seed: u64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Tolerance profile (overrides the CTXOBS_TOL_PROFILE environment variable).
    #[arg(long, global = true, value_enum)]
    tol_profile: Option<TolProfile>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Restrict an operator into an abelian context (upper or lower aspect).
    Restrict {
        /// Operator file (JSON matrix).
        #[arg(long)]
        op: PathBuf,
        /// Context file, or the literal `trivial`.
        #[arg(long)]
        context: String,
        #[arg(long, value_enum)]
        mode: AspectModeArg,
    },
    /// Spectral-order comparisons and lattice operations.
    Order {
        #[command(subcommand)]
        sub: OrderCommand,
    },
    /// Observable-presheaf sections.
    Section {
        #[command(subcommand)]
        sub: SectionCommand,
    },
    /// State-presheaf operations.
    State {
        #[command(subcommand)]
        sub: StateCommand,
    },
    /// Coarse-grain an operator along interior points of its spectrum.
    CoarseGrain {
        #[arg(long)]
        op: PathBuf,
        /// Comma-separated partition points, e.g. `--points 2,4`.
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<f64>,
    },
    /// Run the full acceptance battery.
    Selftest,
}

#[derive(Subcommand)]
enum OrderCommand {
    /// Compare two operators in the spectral order.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Spectral-order join of one or more operators.
    Join {
        #[arg(long, num_args = 1.., required = true)]
        ops: Vec<PathBuf>,
    },
    /// Spectral-order meet of one or more operators.
    Meet {
        #[arg(long, num_args = 1.., required = true)]
        ops: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SectionCommand {
    /// Canonical section of an operator over a context family.
    FromOp {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        family: PathBuf,
        #[arg(long, value_enum)]
        mode: AspectModeArg,
    },
    /// Check the compatibility law on a section file.
    Validate {
        #[arg(long)]
        section: PathBuf,
        #[arg(long, value_enum)]
        mode: AspectModeArg,
    },
    /// Build, validate and refute the dimension-3 counterexample section.
    C3Demo {
        /// Number of contexts in the generated family.
        #[arg(long, default_value_t = 64)]
        contexts: usize,
    },
    /// Glue a validated section to a function table on projections.
    Glue {
        #[arg(long)]
        section: PathBuf,
    },
}

#[derive(Subcommand)]
enum StateCommand {
    /// Extend a finitely additive measure to the linear functional on a context.
    Extend {
        #[arg(long)]
        measure: PathBuf,
        /// Optional operator to evaluate under the extended functional.
        #[arg(long)]
        apply: Option<PathBuf>,
    },
    /// Restrict a context state to a coarser context.
    Restrict {
        #[arg(long)]
        state: PathBuf,
        /// Target context file, or the literal `trivial`.
        #[arg(long)]
        context: String,
    },
    /// Check the compatibility law on a state-section file.
    Validate {
        #[arg(long)]
        section: PathBuf,
    },
    /// Build the dimension-2 state-section counterexample.
    C2Demo,
    /// Least-squares density-matrix fit to a state section.
    Fit {
        #[arg(long)]
        section: PathBuf,
    },
    /// Quasistate evaluation at the line of a unit vector.
    Quasistate {
        #[arg(long)]
        op: PathBuf,
        #[arg(long)]
        vector: PathBuf,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
}

fn dispatch(cli: &Cli, run_cfg: &RunConfig) -> commands::CommandOutcome {
    match &cli.command {
        Command::Restrict { op, context, mode } => {
            commands::restrict::run(op, context, *mode, run_cfg)
        }
        Command::Order { sub } => match sub {
            OrderCommand::Compare { a, b } => commands::order::compare(a, b, run_cfg),
            OrderCommand::Join { ops } => commands::order::lattice(ops, false, run_cfg),
            OrderCommand::Meet { ops } => commands::order::lattice(ops, true, run_cfg),
        },
        Command::Section { sub } => match sub {
            SectionCommand::FromOp { op, family, mode } => {
                commands::section::from_op(op, family, *mode, run_cfg)
            }
            SectionCommand::Validate { section, mode } => {
                commands::section::validate(section, *mode, run_cfg)
            }
            SectionCommand::C3Demo { contexts } => commands::section::c3_demo(*contexts, run_cfg),
            SectionCommand::Glue { section } => commands::section::glue(section, run_cfg),
        },
        Command::State { sub } => match sub {
            StateCommand::Extend { measure, apply } => {
                commands::state::extend(measure, apply.as_deref(), run_cfg)
            }
            StateCommand::Restrict { state, context } => {
                commands::state::restrict(state, context, run_cfg)
            }
            StateCommand::Validate { section } => commands::state::validate(section, run_cfg),
            StateCommand::C2Demo => commands::state::c2_demo(run_cfg),
            StateCommand::Fit { section } => commands::state::fit(section, run_cfg),
            StateCommand::Quasistate { op, vector, samples } => {
                commands::state::quasistate(op, vector, *samples, run_cfg)
            }
        },
        Command::CoarseGrain { op, points } => commands::coarse::run(op, points, run_cfg),
        Command::Selftest => commands::selftest::run(run_cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run_cfg = match RunConfig::resolve(cli.seed, cli.format, cli.out.clone(), cli.tol_profile)
    {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("error[bad-config]: {message}");
            return ExitCode::from(errors::EXIT_INPUT as u8);
        }
    };
    match dispatch(&cli, &run_cfg) {
        Ok((report, exit)) => {
            if let Err(e) = report.emit(&run_cfg) {
                eprintln!("{e}");
                return ExitCode::from(e.exit_code() as u8);
            }
            ExitCode::from(exit as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
