use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pite::config::ExperimentConfig;
use pite::experiment::{cmd_bounds, cmd_complexity, cmd_run, ExperimentError, Method};
use pite::models::{BoundaryCondition, Model};

#[derive(Parser)]
#[command(name = "pite", version, about = "Trotterised probabilistic imaginary time evolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a model and write run.csv, shots.csv and manifest.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// RNG seed (overrides `seed`).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// CNOT count and depth table for a model family.
    Complexity {
        /// Take the model, its parameters, boundary and delta_tau from a config file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Family::Tim)]
        model: Family,
        #[arg(long, value_enum, default_value_t = Boundary::Periodic)]
        boundary: Boundary,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
        sizes: Vec<usize>,
        /// Trotter step counts.
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        steps: Vec<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Also write complexity.csv into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaling bounds, success probabilities and convergence-step estimate as JSON.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        /// Also write bounds.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accepted for symmetry with `run`; bounds are deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Tim,
    Hubbard,
}

#[derive(Clone, Copy, ValueEnum)]
enum Boundary {
    Periodic,
    Open,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Trotter,
    Lcu,
    Both,
}

fn load(path: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = ExperimentConfig::from_file(path)?;
    if let Some(o) = out {
        cfg.output_dir = o;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn write_into(dir: &Path, name: &str, contents: &str) -> Result<(), ExperimentError> {
    let io = |source| ExperimentError::Io {
        path: dir.join(name),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join(name), contents).map_err(io)
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let cfg = load(&config, out, seed)?;
            let report = cmd_run(&cfg)?;
            let last = report.rows.last().expect("at least the initial row");
            eprintln!(
                "wrote {} steps to {} (final trotter energy {:.6}, p_success {:.4e})",
                report.rows.len(),
                cfg.output_dir.display(),
                last.energy_trotter,
                last.p_success_oracle
            );
        }
        Command::Complexity {
            config,
            model,
            boundary,
            sizes,
            steps,
            method,
            out,
        } => {
            let (model, boundary, delta_tau) = match config {
                Some(p) => {
                    let cfg = ExperimentConfig::from_file(&p)?;
                    (cfg.model.model, cfg.model.boundary, cfg.delta_tau)
                }
                None => {
                    let model = match model {
                        Family::Tim => Model::Tim { j: 0.5, h: 0.1 },
                        Family::Hubbard => Model::Hubbard { t: -0.1, u: 0.1 },
                    };
                    let boundary = match boundary {
                        Boundary::Periodic => BoundaryCondition::Periodic,
                        Boundary::Open => BoundaryCondition::Open,
                    };
                    (model, boundary, 0.1)
                }
            };
            let method = match method {
                MethodArg::Trotter => Method::Trotter,
                MethodArg::Lcu => Method::Lcu,
                MethodArg::Both => Method::Both,
            };
            let csv = cmd_complexity(model, boundary, &sizes, &steps, method, delta_tau)?;
            print!("{csv}");
            if let Some(dir) = out {
                write_into(&dir, "complexity.csv", &csv)?;
            }
        }
        Command::Bounds { config, out, seed } => {
            let cfg = load(&config, None, seed)?;
            let report = cmd_bounds(&cfg)?;
            let json = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
            print!("{json}");
            if let Some(dir) = out {
                write_into(&dir, "bounds.json", &json)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
