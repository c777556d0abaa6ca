//! Energy estimates from per-term shot batches.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::pauli::{PauliTerm, QubitHamiltonian};
use crate::simulate::{run_shots, RngSpec, ShotRecord};
use crate::statevector::StateVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSample {
    pub term: PauliTerm,
    /// Shots executed for this term, successful or not.
    pub n_shots: usize,
    /// Post-selected shots, `N_k`.
    pub n_success: usize,
    pub mean: f64,
    /// Population variance of the ±1 outcomes, `1 − mean²`.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub per_term: Vec<TermSample>,
    pub identity_contribution: f64,
}

/// Where shots come from: a prepared state read out directly, or a circuit
/// with mid-circuit measurements run from an input state.
#[derive(Debug, Clone, Copy)]
pub enum ShotSource<'a> {
    State(&'a StateVector),
    Circuit {
        circuit: &'a Circuit,
        input: &'a StateVector,
        quit_if_fail: bool,
    },
}

impl ShotSource<'_> {
    fn shots(&self, term: &PauliTerm, n_shots: usize, rng: &RngSpec) -> Result<Vec<ShotRecord>> {
        match *self {
            ShotSource::State(psi) => {
                let c = Circuit::new(psi.n_qubits(), false);
                run_shots(&c, psi, n_shots, rng, true, Some(term.string()))
            }
            ShotSource::Circuit {
                circuit,
                input,
                quit_if_fail,
            } => run_shots(circuit, input, n_shots, rng, quit_if_fail, Some(term.string())),
        }
    }
}

/// Measures `term` on `n_shots` fresh shots. Each successful readout gives
/// the parity of the term's support, mapped to ±1.
pub fn sample_term(source: &ShotSource<'_>, term: &PauliTerm, n_shots: usize, rng: &RngSpec) -> Result<TermSample> {
    if term.string().is_identity() {
        return Err(Error::IdentityString);
    }
    let mask: u64 = term.string().support().iter().map(|&q| 1u64 << q).sum();
    let shots = source.shots(term, n_shots, rng)?;
    let (mut n_success, mut sum) = (0usize, 0i64);
    for s in shots.iter().filter(|s| s.success) {
        let bits = s.readout.expect("successful shot has a readout");
        sum += if (bits & mask).count_ones() % 2 == 0 { 1 } else { -1 };
        n_success += 1;
    }
    if n_success == 0 {
        return Err(Error::NoStatistics);
    }
    let mean = sum as f64 / n_success as f64;
    Ok(TermSample {
        term: term.clone(),
        n_shots,
        n_success,
        mean,
        variance: (1.0 - mean * mean).max(0.0),
    })
}

/// Samples every non-identity term of `h` with its own batch of `n_shots`.
/// Term `k` draws from `rng.derive(&[k])`.
pub fn sample_hamiltonian(
    source: &ShotSource<'_>,
    h: &QubitHamiltonian,
    n_shots: usize,
    rng: &RngSpec,
) -> Result<Vec<TermSample>> {
    h.terms()
        .par_iter()
        .enumerate()
        .map(|(k, t)| sample_term(source, t, n_shots, &rng.derive(&[k as u64])))
        .collect()
}

/// `⟨H⟩ ≈ c_I + Σ c_k m_k` with `ΔE = √(Σ c_k² var_k / N_k)`.
pub fn combine(samples: &[TermSample], identity_coeff: f64) -> Result<EnergyEstimate> {
    let mut mean = identity_coeff;
    let mut var = 0.0;
    for s in samples {
        if s.n_success == 0 {
            return Err(Error::NoStatistics);
        }
        let c = s.term.coeff();
        mean += c * s.mean;
        var += c * c * s.variance / s.n_success as f64;
    }
    Ok(EnergyEstimate {
        mean,
        stderr: var.sqrt(),
        per_term: samples.to_vec(),
        identity_contribution: identity_coeff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn sample(c: f64, s: &str, var: f64, n: usize) -> TermSample {
        TermSample {
            term: PauliTerm::parse(c, s),
            n_shots: n,
            n_success: n,
            mean: (1.0 - var).sqrt(),
            variance: var,
        }
    }

    #[test]
    fn combine_examples() {
        let e = combine(&[sample(1.0, "Z", 0.0, 10), sample(2.0, "X", 0.0, 10)], 0.5).unwrap();
        assert_eq!(e.stderr, 0.0);
        assert!((e.mean - 3.5).abs() < 1e-14);
        let e = combine(&[sample(1.0, "Z", 1.0, 100), sample(2.0, "X", 1.0, 400)], 0.0).unwrap();
        assert!((e.stderr - 0.02f64.sqrt()).abs() < 1e-14);
        let e = combine(&[], -1.25).unwrap();
        assert_eq!((e.mean, e.stderr), (-1.25, 0.0));
        let mut bad = sample(1.0, "Z", 0.5, 10);
        bad.n_success = 0;
        assert!(matches!(combine(&[bad], 0.0), Err(Error::NoStatistics)));
    }

    #[test]
    fn combine_is_order_invariant() {
        let a = [sample(0.3, "ZZ", 0.2, 50), sample(-1.1, "XI", 0.7, 80), sample(0.05, "IY", 0.9, 20)];
        let mut b = a.clone();
        b.reverse();
        let (ea, eb) = (combine(&a, 0.1).unwrap(), combine(&b, 0.1).unwrap());
        assert!((ea.mean - eb.mean).abs() < 1e-14 && (ea.stderr - eb.stderr).abs() < 1e-14);
    }

    #[test]
    fn eigenstate_samples_are_exact() {
        let zero = StateVector::zero(1).unwrap();
        let s = sample_term(&ShotSource::State(&zero), &PauliTerm::parse(1.0, "Z"), 100, &RngSpec::new(1)).unwrap();
        assert_eq!((s.mean, s.variance, s.n_success), (1.0, 0.0, 100));
        let plus = StateVector::from_amplitudes(vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        let s = sample_term(&ShotSource::State(&plus), &PauliTerm::parse(1.0, "X"), 100, &RngSpec::new(1)).unwrap();
        assert_eq!((s.mean, s.variance), (1.0, 0.0));
        let s = sample_term(&ShotSource::State(&plus), &PauliTerm::parse(1.0, "Z"), 40_000, &RngSpec::new(2)).unwrap();
        assert!(s.mean.abs() < 0.02 && s.variance > 0.999);
        assert!(sample_term(&ShotSource::State(&plus), &PauliTerm::parse(1.0, "I"), 10, &RngSpec::new(2)).is_err());
    }
}
