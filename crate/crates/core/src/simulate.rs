//! Running circuits with mid-circuit measurements: exact post-selected
//! trajectories and seeded shot sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliString};
use crate::statevector::StateVector;

/// Below this success probability post-selection is considered impossible.
pub const ANNIHILATION_TOL: f64 = 1e-14;

/// Post-selected evolution where every measurement returned 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// System register only; the ancilla is back in `|0⟩` and dropped.
    pub final_state: StateVector,
    pub step_probs: Vec<f64>,
    pub cumulative_prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub success: bool,
    /// Index of the first measurement that returned 1.
    pub failed_at: Option<usize>,
    /// System readout as a little-endian bitstring, present iff `success`.
    pub readout: Option<u64>,
}

/// Seed and generator for shot sampling. Shot `k` draws from its own stream
/// `k`, so results do not depend on how shots are scheduled across threads.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub algorithm: String,
}

impl RngSpec {
    pub const CHACHA8: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            algorithm: Self::CHACHA8.to_string(),
        }
    }

    /// Deterministic child spec for a labelled sub-experiment.
    pub fn derive(&self, labels: &[u64]) -> Self {
        let seed = labels.iter().fold(splitmix64(self.seed), |acc, &l| splitmix64(acc ^ splitmix64(l)));
        Self {
            seed,
            algorithm: self.algorithm.clone(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.algorithm != Self::CHACHA8 {
            return Err(Error::InvalidArgument(format!(
                "unsupported rng algorithm {:?}; only {:?} is available",
                self.algorithm,
                Self::CHACHA8
            )));
        }
        Ok(())
    }

    fn shot_rng(&self, shot: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(shot as u64);
        rng
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn prepare(c: &Circuit, psi0: &StateVector) -> Result<StateVector> {
    if psi0.n_qubits() != c.n_system() {
        return Err(Error::DimensionMismatch {
            expected: c.n_system(),
            got: psi0.n_qubits(),
        });
    }
    psi0.extend_zero(c.width() - c.n_system())
}

/// Result of applying a circuit with every measurement forced to 0. Stops
/// early when a measurement has (numerically) zero success probability.
struct PostSelected {
    state: StateVector,
    probs: Vec<f64>,
    annihilated: bool,
}

fn post_select(c: &Circuit, psi0: &StateVector) -> Result<PostSelected> {
    let mut state = prepare(c, psi0)?;
    let mut probs = Vec::with_capacity(c.measure_count());
    for g in c.gates() {
        match *g {
            Gate::MeasureReset { q } => {
                let p = state.prob_zero(q).min(1.0);
                probs.push(p);
                if p < ANNIHILATION_TOL {
                    return Ok(PostSelected {
                        state,
                        probs,
                        annihilated: true,
                    });
                }
                state.project_and_reset(q, 0, p);
            }
            _ => state.apply_gate(g)?,
        }
    }
    Ok(PostSelected {
        state,
        probs,
        annihilated: false,
    })
}

/// Applies the circuit, post-selecting every ancilla measurement on 0.
pub fn run_trajectory(c: &Circuit, psi0: &StateVector) -> Result<Trajectory> {
    let run = post_select(c, psi0)?;
    if run.annihilated {
        let index = run.probs.len() - 1;
        return Err(Error::StateAnnihilated {
            index,
            probability: run.probs[index],
        });
    }
    let cumulative_prob = run.probs.iter().product();
    Ok(Trajectory {
        final_state: run.state.truncate(c.n_system()),
        step_probs: run.probs,
        cumulative_prob,
    })
}

/// Rotates `psi` so that a computational-basis readout measures `basis`
/// on its non-identity qubits.
pub fn rotate_to_basis(psi: &StateVector, basis: &PauliString) -> Result<StateVector> {
    if basis.len() != psi.n_qubits() {
        return Err(Error::LengthMismatch {
            left: psi.n_qubits(),
            right: basis.len(),
        });
    }
    let mut s = psi.clone();
    for q in basis.support() {
        match basis.axis(q) {
            PauliAxis::X => s.apply_gate(&Gate::H { q })?,
            PauliAxis::Y => {
                s.apply_gate(&Gate::Sdg { q })?;
                s.apply_gate(&Gate::H { q })?;
            }
            _ => {}
        }
    }
    Ok(s)
}

/// Cumulative readout distribution of the (rotated) system state.
fn readout_cdf(psi: &StateVector, basis: Option<&PauliString>) -> Result<Vec<f64>> {
    let rotated = match basis {
        Some(b) => rotate_to_basis(psi, b)?,
        None => psi.clone(),
    };
    let mut acc = 0.0;
    Ok(rotated
        .probabilities()
        .into_iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect())
}

fn sample_cdf(cdf: &[f64], rng: &mut ChaCha8Rng) -> u64 {
    let u = rng.random::<f64>() * cdf.last().copied().unwrap_or(1.0);
    let k = cdf.partition_point(|&c| c <= u);
    k.min(cdf.len() - 1) as u64
}

/// Samples `n_shots` executions. Every measurement outcome follows its Born
/// probability; a 1 marks the shot failed. Successful shots end with a
/// readout of the system register, rotated into `readout_basis` if given.
///
/// With `quit_if_fail` the simulator uses the fact that every surviving shot
/// has followed the same deterministic post-selected path: measurement `i`
/// succeeds with the trajectory probability `p_i`, so one uniform draw
/// against the running survival probability picks the failing measurement.
/// Without it, each shot is simulated gate by gate, including the failure
/// branch, to the end of the circuit.
pub fn run_shots(
    c: &Circuit,
    psi0: &StateVector,
    n_shots: usize,
    rng: &RngSpec,
    quit_if_fail: bool,
    readout_basis: Option<&PauliString>,
) -> Result<Vec<ShotRecord>> {
    rng.check()?;
    if n_shots == 0 {
        return Err(Error::InvalidArgument("n_shots must be at least 1".into()));
    }
    if let Some(b) = readout_basis {
        if b.len() != c.n_system() {
            return Err(Error::LengthMismatch {
                left: c.n_system(),
                right: b.len(),
            });
        }
    }
    if quit_if_fail {
        shots_quit_if_fail(c, psi0, n_shots, rng, readout_basis)
    } else {
        shots_full(c, psi0, n_shots, rng, readout_basis)
    }
}

fn shots_quit_if_fail(
    c: &Circuit,
    psi0: &StateVector,
    n_shots: usize,
    rng: &RngSpec,
    readout_basis: Option<&PauliString>,
) -> Result<Vec<ShotRecord>> {
    let run = post_select(c, psi0)?;
    let mut survival = Vec::with_capacity(run.probs.len());
    let mut s = 1.0;
    for (i, &p) in run.probs.iter().enumerate() {
        let annihilated = run.annihilated && i + 1 == run.probs.len();
        s *= if annihilated { 0.0 } else { p };
        survival.push(s);
    }
    let cdf = if run.annihilated {
        Vec::new()
    } else {
        readout_cdf(&run.state.truncate(c.n_system()), readout_basis)?
    };

    Ok((0..n_shots)
        .into_par_iter()
        .map(|k| {
            let mut r = rng.shot_rng(k);
            let u: f64 = r.random();
            // survival is non-increasing; the first index with S_i <= u fails
            let fail = survival.partition_point(|&s| s > u);
            if fail < survival.len() {
                ShotRecord {
                    success: false,
                    failed_at: Some(fail),
                    readout: None,
                }
            } else {
                ShotRecord {
                    success: true,
                    failed_at: None,
                    readout: Some(sample_cdf(&cdf, &mut r)),
                }
            }
        })
        .collect())
}

fn shots_full(
    c: &Circuit,
    psi0: &StateVector,
    n_shots: usize,
    rng: &RngSpec,
    readout_basis: Option<&PauliString>,
) -> Result<Vec<ShotRecord>> {
    let start = prepare(c, psi0)?;
    (0..n_shots)
        .into_par_iter()
        .map(|k| {
            let mut r = rng.shot_rng(k);
            let mut state = start.clone();
            let mut failed_at = None;
            let mut m = 0;
            for g in c.gates() {
                match *g {
                    Gate::MeasureReset { q } => {
                        let p0 = state.prob_zero(q).clamp(0.0, 1.0);
                        let u: f64 = r.random();
                        if u < p0 {
                            state.project_and_reset(q, 0, p0);
                        } else {
                            failed_at.get_or_insert(m);
                            state.project_and_reset(q, 1, 1.0 - p0);
                        }
                        m += 1;
                    }
                    _ => state.apply_gate(g)?,
                }
            }
            if failed_at.is_some() {
                return Ok(ShotRecord {
                    success: false,
                    failed_at,
                    readout: None,
                });
            }
            let cdf = readout_cdf(&state.truncate(c.n_system()), readout_basis)?;
            Ok(ShotRecord {
                success: true,
                failed_at: None,
                readout: Some(sample_cdf(&cdf, &mut r)),
            })
        })
        .collect()
}
