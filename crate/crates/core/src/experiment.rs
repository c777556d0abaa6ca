//! The three experiment commands: time-stepped runs, circuit-complexity
//! tables and success-probability/convergence bounds.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::circuit::{Circuit, ComplexityRow};
use crate::config::{ConfigError, ExperimentConfig};
use crate::error::Error;
use crate::estimator::{combine, sample_hamiltonian, ShotSource};
use crate::models::{Model, ModelSpec};
use crate::oracle::{
    convergence_steps, exact_ground, exact_ite_with, scaling_bounds, trotter_success_probability, two_level,
    ScalingBounds, Spectrum, TwoLevel,
};
use crate::pauli::{QubitHamiltonian, DENSE_QUBIT_CAP};
use crate::simulate::{run_trajectory, RngSpec};
use crate::statevector::{expectation, StateVector, TRAJECTORY_QUBIT_CAP};
use crate::synth::{lcu_pite_circuit, trotter_pite_circuit, trotter_scaling, trotter_step_circuit, TrotterSchedule};

/// Circuits are only counted, never simulated, for the complexity tables.
pub const COUNTING_QUBIT_CAP: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl ExperimentError {
    /// 2 for configuration problems, 3 for sizes beyond a width cap, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Core(Error::TooManyQubits { .. }) => 3,
            _ => 1,
        }
    }
}

pub type ExperimentResult<T> = std::result::Result<T, ExperimentError>;

/// Floats in every CSV carry 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub step: usize,
    pub tau: f64,
    pub energy_exact: Option<f64>,
    pub energy_trotter: f64,
    pub energy_sampled: Option<f64>,
    pub energy_stderr: Option<f64>,
    pub p_success_oracle: f64,
    pub p_success_sampled: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShotRow {
    pub step: usize,
    /// Shots over all term batches of this step.
    pub n_shots: usize,
    pub n_success: usize,
    pub energy_mean: Option<f64>,
    pub energy_stderr: Option<f64>,
    pub success_frac: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub hamiltonian: QubitHamiltonian,
    pub ground_energy: Option<f64>,
    pub rows: Vec<RunRow>,
    pub shots: Vec<ShotRow>,
}

pub const RUN_CSV_HEADER: &str =
    "step,tau,energy_exact,energy_trotter,energy_sampled,energy_stderr,p_success_oracle,p_success_sampled";
pub const SHOTS_CSV_HEADER: &str = "step,n_shots,n_success,energy_mean,energy_stderr,success_frac";

impl RunReport {
    pub fn run_csv(&self) -> String {
        let mut out = format!("{RUN_CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.step,
                fmt_float(r.tau),
                fmt_opt(r.energy_exact),
                fmt_float(r.energy_trotter),
                fmt_opt(r.energy_sampled),
                fmt_opt(r.energy_stderr),
                fmt_float(r.p_success_oracle),
                fmt_opt(r.p_success_sampled),
            );
        }
        out
    }

    pub fn shots_csv(&self) -> String {
        let mut out = format!("{SHOTS_CSV_HEADER}\n");
        for s in &self.shots {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.step,
                s.n_shots,
                s.n_success,
                fmt_opt(s.energy_mean),
                fmt_opt(s.energy_stderr),
                fmt_float(s.success_frac),
            );
        }
        out
    }
}

fn check_cap(what: &'static str, n_qubits: usize, cap: usize) -> Result<(), Error> {
    if n_qubits > cap {
        return Err(Error::TooManyQubits { what, n_qubits, cap });
    }
    Ok(())
}

/// System state produced by the configured initial-state circuit.
pub fn initial_state(spec: &ModelSpec, theta: f64) -> Result<StateVector, Error> {
    let c = spec.initial_circuit(theta)?;
    Ok(run_trajectory(&c, &StateVector::zero(c.n_system())?)?.final_state)
}

/// Evolves the configured model step by step. Every reported step `r` gets
/// its own independent shot experiment on the full `r`-step circuit.
pub fn run_experiment(cfg: &ExperimentConfig) -> ExperimentResult<RunReport> {
    let n = cfg.n_qubits();
    check_cap("trajectory", n + 1, TRAJECTORY_QUBIT_CAP)?;
    let h = cfg.model.hamiltonian()?;
    let init = cfg.model.initial_circuit(cfg.theta)?;
    let psi0 = initial_state(&cfg.model, cfg.theta)?;
    let zero = StateVector::zero(n)?;
    let spectrum: Option<Spectrum> = if n <= DENSE_QUBIT_CAP { Some(exact_ground(&h)?) } else { None };

    let schedule = TrotterSchedule::new(&h, 1, cfg.delta_tau)?;
    let step_circuit = trotter_step_circuit(&h, &schedule)?;
    let rng = RngSpec::new(cfg.seed);

    let mut rows = Vec::with_capacity(cfg.n_steps + 1);
    let mut shots = Vec::new();
    let mut psi = psi0.clone();
    let mut p_oracle = 1.0;
    let mut full = init.clone();
    for r in 0..=cfg.n_steps {
        if r > 0 {
            let t = run_trajectory(&step_circuit, &psi)?;
            psi = t.final_state;
            p_oracle *= t.cumulative_prob;
            full.append(&step_circuit)?;
        }
        let tau = r as f64 * cfg.delta_tau;
        let energy_exact = match &spectrum {
            Some(s) => Some(expectation(&exact_ite_with(s, tau, &psi0)?.0, &h)?),
            None => None,
        };
        let mut row = RunRow {
            step: r,
            tau,
            energy_exact,
            energy_trotter: expectation(&psi, &h)?,
            energy_sampled: None,
            energy_stderr: None,
            p_success_oracle: p_oracle,
            p_success_sampled: None,
        };
        if cfg.mode.samples() {
            let source = ShotSource::Circuit {
                circuit: &full,
                input: &zero,
                quit_if_fail: cfg.quit_if_fail,
            };
            let shot_row = sample_step(&source, &h, cfg.n_shots, &rng.derive(&[r as u64]), r)?;
            row.energy_sampled = shot_row.energy_mean;
            row.energy_stderr = shot_row.energy_stderr;
            row.p_success_sampled = Some(shot_row.success_frac);
            shots.push(shot_row);
        }
        rows.push(row);
    }

    Ok(RunReport {
        config: cfg.clone(),
        ground_energy: spectrum.map(|s| s.ground_energy()),
        hamiltonian: h,
        rows,
        shots,
    })
}

fn sample_step(
    source: &ShotSource<'_>,
    h: &QubitHamiltonian,
    n_shots: usize,
    rng: &RngSpec,
    step: usize,
) -> ExperimentResult<ShotRow> {
    let samples = match sample_hamiltonian(source, h, n_shots, rng) {
        Ok(s) => Some(s),
        Err(Error::NoStatistics) => None,
        Err(e) => return Err(e.into()),
    };
    // an identity-only Hamiltonian needs no shots at all
    let (n_total, n_success, estimate) = match samples {
        Some(s) if !s.is_empty() => {
            let n_total = s.iter().map(|t| t.n_shots).sum();
            let n_success = s.iter().map(|t| t.n_success).sum();
            (n_total, n_success, Some(combine(&s, h.identity_coeff())?))
        }
        Some(_) => (0, 0, Some(combine(&[], h.identity_coeff())?)),
        None => (n_shots * h.terms().len(), 0, None),
    };
    Ok(ShotRow {
        step,
        n_shots: n_total,
        n_success,
        energy_mean: estimate.as_ref().map(|e| e.mean),
        energy_stderr: estimate.as_ref().map(|e| e.stderr),
        success_frac: if n_total == 0 { 1.0 } else { n_success as f64 / n_total as f64 },
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    rng: RngSpec,
    config: &'a ExperimentConfig,
    hamiltonian: &'a QubitHamiltonian,
    ground_energy: Option<f64>,
    files: Vec<&'static str>,
}

pub const RUN_CSV: &str = "run.csv";
pub const SHOTS_CSV: &str = "shots.csv";
pub const MANIFEST_JSON: &str = "manifest.json";

fn write_file(path: &Path, contents: &str) -> ExperimentResult<()> {
    std::fs::write(path, contents).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the experiment and writes `run.csv`, `shots.csv` (when sampling)
/// and `manifest.json` into `cfg.output_dir`.
pub fn cmd_run(cfg: &ExperimentConfig) -> ExperimentResult<RunReport> {
    let report = run_experiment(cfg)?;
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir).map_err(|source| ExperimentError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut files = vec![RUN_CSV];
    write_file(&dir.join(RUN_CSV), &report.run_csv())?;
    if cfg.mode.samples() {
        files.push(SHOTS_CSV);
        write_file(&dir.join(SHOTS_CSV), &report.shots_csv())?;
    }
    files.push(MANIFEST_JSON);
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        rng: RngSpec::new(cfg.seed),
        config: cfg,
        hamiltonian: &report.hamiltonian,
        ground_energy: report.ground_energy,
        files,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
    write_file(&dir.join(MANIFEST_JSON), &json)?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Trotter,
    Lcu,
    Both,
}

/// Reference counts `(n_sites, n_t, g_trotter, d_trotter, g_lcu, d_lcu)`.
const TIM_REFERENCE: &[(usize, usize, usize, usize, usize, usize)] = &[
    (2, 1, 8, 8, 14, 14),
    (2, 10, 80, 80, 140, 140),
    (2, 100, 800, 800, 1400, 1400),
    (4, 1, 24, 24, 40, 40),
    (4, 10, 240, 231, 400, 391),
    (4, 100, 2400, 2301, 4000, 3901),
    (8, 1, 48, 48, 80, 80),
    (8, 10, 480, 471, 800, 791),
    (8, 100, 4800, 4701, 8000, 7901),
    (16, 1, 96, 96, 160, 160),
    (16, 10, 960, 951, 1600, 1591),
    (16, 100, 9600, 9501, 16000, 15901),
];

/// Reference counts `(n_sites, n_t, g_trotter, d_trotter)`; no LCU
/// values exist for this model.
const HUBBARD_REFERENCE: &[(usize, usize, usize, usize)] = &[
    (2, 1, 40, 38),
    (2, 10, 400, 380),
    (2, 100, 4000, 3800),
    (4, 1, 160, 151),
    (4, 10, 1600, 1483),
    (4, 100, 16000, 14803),
    (8, 1, 352, 327),
    (8, 10, 3520, 3243),
    (8, 100, 35200, 32403),
    (16, 1, 488, 430),
    (16, 10, 4880, 4273),
    (16, 100, 48800, 42703),
];

/// Reference `(g_trotter, d_trotter, g_lcu, d_lcu)` for a table cell, where known.
pub fn reference_counts(model: &Model, n_sites: usize, n_t: usize) -> [Option<usize>; 4] {
    match model {
        Model::Tim { .. } => TIM_REFERENCE
            .iter()
            .find(|r| r.0 == n_sites && r.1 == n_t)
            .map_or([None; 4], |r| [Some(r.2), Some(r.3), Some(r.4), Some(r.5)]),
        Model::Hubbard { .. } => HUBBARD_REFERENCE
            .iter()
            .find(|r| r.0 == n_sites && r.1 == n_t)
            .map_or([None; 4], |r| [Some(r.2), Some(r.3), None, None]),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplexityEntry {
    pub trotter: Option<ComplexityRow>,
    pub lcu: Option<ComplexityRow>,
    pub expected: [Option<usize>; 4],
}

/// Counts CNOTs and CNOT depth of the time-evolution part of each circuit
/// (initial-state preparation excluded). `n_p` counts every Pauli string of
/// the Hamiltonian, the identity included when present.
pub fn complexity_rows(
    model: Model,
    boundary: crate::models::BoundaryCondition,
    sizes: &[usize],
    n_ts: &[usize],
    method: Method,
    delta_tau: f64,
) -> ExperimentResult<Vec<ComplexityEntry>> {
    let mut out = Vec::new();
    for &n_sites in sizes {
        let spec = ModelSpec::new(model, n_sites, boundary)?;
        check_cap("circuit counting", spec.n_qubits() + 1, COUNTING_QUBIT_CAP)?;
        let h = spec.hamiltonian()?;
        let empty = Circuit::new(h.n_qubits(), false);
        for &n_t in n_ts {
            let schedule = TrotterSchedule::new(&h, n_t, delta_tau)?;
            let row = |c: &Circuit| ComplexityRow {
                n_sites,
                n_p: h.n_strings(),
                width: h.n_qubits() + 1,
                n_t,
                cnot_count: c.cnot_count(),
                cnot_depth: c.cnot_depth(),
            };
            let trotter = match method {
                Method::Trotter | Method::Both => Some(row(&trotter_pite_circuit(&h, &schedule, &empty)?)),
                Method::Lcu => None,
            };
            let lcu = match method {
                Method::Lcu | Method::Both => Some(row(&lcu_pite_circuit(&h, &schedule)?)),
                Method::Trotter => None,
            };
            out.push(ComplexityEntry {
                trotter,
                lcu,
                expected: reference_counts(&model, n_sites, n_t),
            });
        }
    }
    Ok(out)
}

fn opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Complexity table as CSV. Single-method tables use the `g,d` columns; the
/// combined table labels each pair. Trailing `*_expected` columns hold the
/// reference values where they exist.
pub fn cmd_complexity(
    model: Model,
    boundary: crate::models::BoundaryCondition,
    sizes: &[usize],
    n_ts: &[usize],
    method: Method,
    delta_tau: f64,
) -> ExperimentResult<String> {
    let entries = complexity_rows(model, boundary, sizes, n_ts, method, delta_tau)?;
    let mut out = String::new();
    match method {
        Method::Trotter | Method::Lcu => out.push_str("n_sites,n_p,width,n_t,g,d,g_expected,d_expected\n"),
        Method::Both => out.push_str(
            "n_sites,n_p,width,n_t,g_trotter,d_trotter,g_lcu,d_lcu,\
             g_trotter_expected,d_trotter_expected,g_lcu_expected,d_lcu_expected\n",
        ),
    }
    for e in entries {
        let [gt, dt, gl, dl] = e.expected.map(opt_usize);
        match (method, &e.trotter, &e.lcu) {
            (Method::Trotter, Some(r), _) => {
                let _ = writeln!(out, "{},{gt},{dt}", r.to_csv_line());
            }
            (Method::Lcu, _, Some(r)) => {
                let _ = writeln!(out, "{},{gl},{dl}", r.to_csv_line());
            }
            (Method::Both, Some(t), Some(l)) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{gt},{dt},{gl},{dl}",
                    t.n_sites, t.n_p, t.width, t.n_t, t.cnot_count, t.cnot_depth, l.cnot_count, l.cnot_depth
                );
            }
            _ => unreachable!("rows are built for the requested method"),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n_steps: usize,
    pub delta_tau: f64,
    pub lambda: f64,
    /// `e^{-rΔτλ}`, the scale of the Trotterised block encoding.
    pub trotter_scaling: f64,
    pub scaling_bounds: ScalingBounds,
    /// `e^{-4rΔτλ}`
    pub p_success_lower_bound: f64,
    pub p_success_oracle: f64,
    pub ground_energy: f64,
    pub two_level: TwoLevel,
    pub epsilon: f64,
    pub r_epsilon: u64,
}

/// Dense bounds for the configured model after `n_steps` Trotter steps.
pub fn cmd_bounds(cfg: &ExperimentConfig) -> ExperimentResult<BoundsReport> {
    check_cap("dense oracle", cfg.n_qubits(), DENSE_QUBIT_CAP)?;
    let h = cfg.model.hamiltonian()?;
    let schedule = TrotterSchedule::new(&h, cfg.n_steps, cfg.delta_tau)?;
    let psi0 = initial_state(&cfg.model, cfg.theta)?;
    let spectrum = exact_ground(&h)?;
    let tl = two_level(&spectrum, &psi0)?;
    let lambda = h.one_norm();
    Ok(BoundsReport {
        n_steps: cfg.n_steps,
        delta_tau: cfg.delta_tau,
        lambda,
        trotter_scaling: trotter_scaling(&h, &schedule),
        scaling_bounds: scaling_bounds(&h, &schedule)?,
        p_success_lower_bound: (-4.0 * schedule.total_tau() * lambda).exp(),
        p_success_oracle: trotter_success_probability(&h, &schedule, &psi0)?,
        ground_energy: spectrum.ground_energy(),
        two_level: tl,
        epsilon: cfg.epsilon,
        r_epsilon: convergence_steps(tl.e0, tl.e1, tl.a0, tl.a1, cfg.delta_tau, cfg.epsilon)?,
    })
}
