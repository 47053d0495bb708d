use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use casimir_cli::config::{self, OracleTable, OutputConfig, RunConfig, Task, UnitConvention};
use casimir_cli::runner::{execute, RunError, RunOptions};

/// Casimir interaction energy between nested cylindrical conductors by
/// point-matching collocation.
#[derive(Parser)]
#[command(name = "casimir", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a key=value configuration file and emit CSV.
    Run {
        /// Path to the configuration file.
        config: PathBuf,
        /// Write the CSV here instead of the config's output.csv (or stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Append a cosine-amplitude fit row (phi0 sweeps only).
        #[arg(long)]
        fit: bool,
        /// Evaluate sweep points sequentially in input order.
        #[arg(long = "deterministic-sum")]
        deterministic_sum: bool,
    },
    /// Regenerate a reference table (currently: table1).
    Oracle {
        /// Table name.
        table: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit codes: 1 usage/io, 2 configuration, 3 geometry, 4 singular system or
/// special-function domain, 5 convergence, 6 invariant violation, 7 partial
/// sweep failure.
fn exit_code_for(err: &RunError) -> u8 {
    use casimir_core::Error as E;
    match err {
        RunError::Io(_) => 1,
        RunError::Config(_) | RunError::Fit(_) | RunError::FitWithoutPhi0Sweep => 2,
        RunError::PartialSweep { .. } => 7,
        RunError::Core(core) => match core {
            E::StarShapeViolation(_) | E::NestingViolation { .. } => 3,
            E::SpecFunDomain(_) | E::SingularCollocation { .. } => 4,
            E::NonConvergence(_) => 5,
            E::SignViolation { .. } | E::RealityViolation { .. } => 6,
            E::InvalidParameter(_) => 2,
        },
    }
}

fn write_output(
    config: &RunConfig,
    options: &RunOptions,
    out_flag: Option<PathBuf>,
) -> Result<(), RunError> {
    let target = out_flag.or_else(|| config.output.csv.clone().map(PathBuf::from));
    match target {
        Some(path) => {
            let mut buf = Vec::new();
            execute(config, options, &mut buf)?;
            fs::write(&path, &buf)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            execute(config, options, &mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config: path,
            out,
            fit,
            deterministic_sum,
        } => {
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            };
            match config::parse_config(&text) {
                Ok(cfg) => write_output(
                    &cfg,
                    &RunOptions {
                        fit,
                        deterministic: deterministic_sum,
                    },
                    out,
                ),
                Err(e) => Err(RunError::Config(e)),
            }
        }
        Command::Oracle { table, out } => {
            if table != "table1" {
                eprintln!("error: unknown table '{table}' (available: table1)");
                return ExitCode::from(2);
            }
            let cfg = RunConfig {
                task: Task::Oracle(OracleTable::Table1),
                geometry: None,
                numerics: config::NumericsConfig {
                    s: 18,
                    y_max: None,
                    rel_tolerance: 1e-6,
                    polarization: config::PolarizationChoice::Both,
                    te_variant: config::TeVariant::Radial,
                },
                output: OutputConfig {
                    csv: None,
                    units: UnitConvention::PerA2,
                },
            };
            write_output(&cfg, &RunOptions::default(), out)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
