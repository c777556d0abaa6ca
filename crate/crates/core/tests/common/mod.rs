#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use pite::models::{BoundaryCondition, Model, ModelSpec};
use pite::pauli::{PauliAxis, PauliString, PauliTerm, QubitHamiltonian};
use pite::statevector::StateVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn tim(n: usize) -> ModelSpec {
    ModelSpec::new(Model::Tim { j: 0.5, h: 0.1 }, n, BoundaryCondition::Periodic).unwrap()
}

pub fn hubbard(m: usize) -> ModelSpec {
    ModelSpec::new(Model::Hubbard { t: -0.1, u: 0.1 }, m, BoundaryCondition::Periodic).unwrap()
}

pub fn random_string(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
    loop {
        let axes: Vec<_> = (0..n).map(|_| PauliAxis::ALL[rng.random_range(0..4)]).collect();
        let s = PauliString::from_axes(axes);
        if !s.is_identity() {
            return s;
        }
    }
}

/// Random Hamiltonian with coefficients uniform in [-1, 1].
pub fn random_hamiltonian(rng: &mut ChaCha8Rng, n: usize, max_terms: usize) -> QubitHamiltonian {
    let m = rng.random_range(1..=max_terms);
    let terms: Vec<_> = (0..m)
        .map(|_| PauliTerm::new(rng.random_range(-1.0..=1.0), random_string(rng, n)).unwrap())
        .collect();
    QubitHamiltonian::new(n, terms).unwrap()
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(amps).unwrap()
}

/// Matrix exponential by nalgebra's Padé scaling-and-squaring routine; kept
/// independent of the closed forms used inside the crate.
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    m.clone().exp()
}

/// All Pauli strings on `n` qubits with weight in `1..=max_weight`.
pub fn all_strings(n: usize, max_weight: usize) -> Vec<PauliString> {
    (0..4usize.pow(n as u32))
        .map(|mut k| {
            let axes = (0..n)
                .map(|_| {
                    let a = PauliAxis::ALL[k % 4];
                    k /= 4;
                    a
                })
                .collect();
            PauliString::from_axes(axes)
        })
        .filter(|s| (1..=max_weight).contains(&s.weight()))
        .collect()
}

/// Least-squares slope of log(y) against log(x).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
