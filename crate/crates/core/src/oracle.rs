//! Dense reference computations: exact imaginary-time evolution, the dense
//! Trotter product, spectra, spectral norms and scaling bounds.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{check_dense_cap, PauliTerm, QubitHamiltonian};
use crate::statevector::StateVector;
use crate::synth::TrotterSchedule;

/// Eigenvalues are grouped into one degenerate level when closer than this.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns matching `eigenvalues`.
    pub eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> StateVector {
        StateVector::from_amplitudes(self.eigenvectors.column(0).iter().copied().collect())
            .expect("eigenvector is a unit vector")
    }

    /// Squared overlap of `psi` with each degenerate level, as `(energy, weight)`.
    pub fn level_weights(&self, psi: &StateVector) -> Result<Vec<(f64, f64)>> {
        if psi.dim() != self.eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                expected: self.eigenvalues.len(),
                got: psi.dim(),
            });
        }
        let v = DVector::from_column_slice(psi.amplitudes());
        let overlaps = self.eigenvectors.adjoint() * v;
        let mut levels: Vec<(f64, f64)> = Vec::new();
        for (k, &e) in self.eigenvalues.iter().enumerate() {
            let w = overlaps[k].norm_sqr();
            match levels.last_mut() {
                Some((e0, acc)) if (e - *e0).abs() <= DEGENERACY_TOL => *acc += w,
                _ => levels.push((e, w)),
            }
        }
        Ok(levels)
    }

    /// Squared projection of `psi` onto the (possibly degenerate) ground level.
    pub fn ground_overlap(&self, psi: &StateVector) -> Result<f64> {
        Ok(self.level_weights(psi)?[0].1)
    }
}

/// Full Hermitian eigendecomposition of `h`.
pub fn exact_ground(h: &QubitHamiltonian) -> Result<Spectrum> {
    spectrum_of(&h.to_dense()?)
}

pub fn spectrum_of(m: &DMatrix<Complex64>) -> Result<Spectrum> {
    let residual = (m - m.adjoint()).norm();
    if residual > 1e-10 * m.norm().max(1.0) {
        return Err(Error::NonHermitian(residual));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// `e^{-Hτ}` from the eigendecomposition.
pub fn ite_operator(h: &QubitHamiltonian, tau: f64) -> Result<DMatrix<Complex64>> {
    let s = exact_ground(h)?;
    let d = DMatrix::from_diagonal(&DVector::from_iterator(
        s.eigenvalues.len(),
        s.eigenvalues.iter().map(|&e| Complex64::new((-e * tau).exp(), 0.0)),
    ));
    Ok(&s.eigenvectors * d * s.eigenvectors.adjoint())
}

/// Normalised `e^{-Hτ}|ψ0⟩` and the norm `‖e^{-Hτ}ψ0‖`.
pub fn exact_ite(h: &QubitHamiltonian, tau: f64, psi0: &StateVector) -> Result<(StateVector, f64)> {
    let s = exact_ground(h)?;
    exact_ite_with(&s, tau, psi0)
}

/// As [`exact_ite`], reusing a precomputed spectrum. Energies are shifted by
/// the ground energy before exponentiating so long times do not overflow;
/// the returned norm is corrected back.
pub fn exact_ite_with(s: &Spectrum, tau: f64, psi0: &StateVector) -> Result<(StateVector, f64)> {
    if psi0.dim() != s.eigenvalues.len() {
        return Err(Error::DimensionMismatch {
            expected: s.eigenvalues.len(),
            got: psi0.dim(),
        });
    }
    let e0 = s.ground_energy();
    let v = DVector::from_column_slice(psi0.amplitudes());
    let mut coeffs = s.eigenvectors.adjoint() * v;
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c *= (-(s.eigenvalues[k] - e0) * tau).exp();
    }
    let out = &s.eigenvectors * coeffs;
    let shifted_norm = out.norm();
    let state = StateVector::from_amplitudes(out.iter().copied().collect())?;
    Ok((state, shifted_norm * (-e0 * tau).exp()))
}

/// `e^{-aσ} = cosh(a)·I − sinh(a)·σ` for a Pauli string `σ`.
pub fn pauli_exponential(term: &PauliTerm, a: f64) -> Result<DMatrix<Complex64>> {
    let s = term.string().to_dense()?;
    let dim = s.nrows();
    let id = DMatrix::<Complex64>::identity(dim, dim);
    Ok(id * Complex64::from(a.cosh()) - s * Complex64::from(a.sinh()))
}

/// `(Π_k e^{-c_k Δτ σ_k})^r` in the schedule's term order.
pub fn dense_trotter_product(h: &QubitHamiltonian, schedule: &TrotterSchedule) -> Result<DMatrix<Complex64>> {
    check_dense_cap("trotter product", h.n_qubits())?;
    let dim = 1usize << h.n_qubits();
    let mut step = DMatrix::<Complex64>::identity(dim, dim);
    for term in schedule.ordered_terms() {
        step = pauli_exponential(term, term.coeff() * schedule.delta_tau)? * step;
    }
    let mut a = DMatrix::<Complex64>::identity(dim, dim);
    for _ in 0..schedule.n_steps {
        a = &step * a;
    }
    Ok(a)
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<Complex64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingBounds {
    pub lambda: f64,
    /// `e^{-λrΔτ}`
    pub lower: f64,
    /// `e^{+λrΔτ}`
    pub upper: f64,
    /// `1/σ_max(A)` for the dense Trotter product `A`.
    pub max_scaling: f64,
}

pub fn scaling_bounds(h: &QubitHamiltonian, schedule: &TrotterSchedule) -> Result<ScalingBounds> {
    let lambda = h.one_norm();
    let x = lambda * schedule.total_tau();
    let a = dense_trotter_product(h, schedule)?;
    Ok(ScalingBounds {
        lambda,
        lower: (-x).exp(),
        upper: x.exp(),
        max_scaling: 1.0 / spectral_norm(&a),
    })
}

/// `α^{-2}⟨ψ|A†A|ψ⟩` with `1/α = e^{-rΔτλ}`: the chance that every
/// measurement of the Trotterised circuit succeeds.
pub fn trotter_success_probability(
    h: &QubitHamiltonian,
    schedule: &TrotterSchedule,
    psi: &StateVector,
) -> Result<f64> {
    let a = dense_trotter_product(h, schedule)?;
    let v = DVector::from_column_slice(psi.amplitudes());
    let scale = (-schedule.total_tau() * h.one_norm()).exp();
    Ok((a * v).norm_squared() * scale * scale)
}

/// Normalised `A|ψ⟩` for the dense Trotter product.
pub fn trotter_state(h: &QubitHamiltonian, schedule: &TrotterSchedule, psi: &StateVector) -> Result<StateVector> {
    let a = dense_trotter_product(h, schedule)?;
    let v = DVector::from_column_slice(psi.amplitudes());
    StateVector::from_amplitudes((a * v).iter().copied().collect())
}

/// Smallest integer `r ≥ ln(|a1|²/(ε|a0|²)) / (2(E1−E0)Δτ)`, or 0 when the
/// logarithm is not positive. `a0` and `a1` are amplitude magnitudes.
/// Any `ε ≥ 1` needs no steps.
pub fn convergence_steps(e0: f64, e1: f64, a0: f64, a1: f64, delta_tau: f64, epsilon: f64) -> Result<u64> {
    if a0 == 0.0 {
        return Err(Error::NoGroundOverlap);
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if epsilon >= 1.0 || a1 == 0.0 {
        return Ok(0);
    }
    if !(e1 > e0) || !(delta_tau > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need E1 > E0 and delta_tau > 0 (E0={e0}, E1={e1}, delta_tau={delta_tau})"
        )));
    }
    let log = (a1 * a1 / (epsilon * a0 * a0)).ln();
    if log <= 0.0 {
        return Ok(0);
    }
    Ok((log / (2.0 * (e1 - e0) * delta_tau)).ceil() as u64)
}

/// Two-level reduction of an initial state: the ground level and the lowest
/// excited level that the state actually overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevel {
    pub e0: f64,
    pub e1: f64,
    pub a0: f64,
    pub a1: f64,
}

/// Levels with squared overlap at or below this are treated as absent.
pub const OVERLAP_TOL: f64 = 1e-12;

pub fn two_level(spectrum: &Spectrum, psi: &StateVector) -> Result<TwoLevel> {
    let levels = spectrum.level_weights(psi)?;
    let (e0, w0) = levels[0];
    if w0 <= OVERLAP_TOL {
        return Err(Error::NoGroundOverlap);
    }
    let (e1, w1) = levels[1..]
        .iter()
        .copied()
        .find(|&(_, w)| w > OVERLAP_TOL)
        .unwrap_or((levels.get(1).map_or(e0 + 1.0, |l| l.0), 0.0));
    Ok(TwoLevel {
        e0,
        e1,
        a0: w0.sqrt(),
        a1: w1.sqrt(),
    })
}
