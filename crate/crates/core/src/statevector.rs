//! Dense statevector with in-place gate kernels. Amplitude index bit `q` is
//! the state of qubit `q`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{rx_matrix, Gate, Polarity};
use crate::error::{Error, Result};
use crate::pauli::QubitHamiltonian;

/// Largest register (system plus ancilla) simulated as a statevector.
pub const TRAJECTORY_QUBIT_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > TRAJECTORY_QUBIT_CAP {
            return Err(Error::TooManyQubits {
                what: "statevector",
                n_qubits,
                cap: TRAJECTORY_QUBIT_CAP,
            });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wraps and normalises raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("{dim} amplitudes is not a power of two")));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > TRAJECTORY_QUBIT_CAP {
            return Err(Error::TooManyQubits {
                what: "statevector",
                n_qubits,
                cap: TRAJECTORY_QUBIT_CAP,
            });
        }
        let mut s = Self { n_qubits, amps };
        if s.norm_sqr() == 0.0 {
            return Err(Error::InvalidArgument("zero vector".into()));
        }
        s.normalize();
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Appends `extra` qubits in `|0⟩` above the existing ones.
    pub fn extend_zero(&self, extra: usize) -> Result<Self> {
        let n = self.n_qubits + extra;
        if n > TRAJECTORY_QUBIT_CAP {
            return Err(Error::TooManyQubits {
                what: "statevector",
                n_qubits: n,
                cap: TRAJECTORY_QUBIT_CAP,
            });
        }
        let mut amps = self.amps.clone();
        amps.resize(1 << n, Complex64::new(0.0, 0.0));
        Ok(Self { n_qubits: n, amps })
    }

    /// The low `n` qubits, assuming every higher qubit is `|0⟩`.
    pub fn truncate(&self, n: usize) -> Self {
        Self {
            n_qubits: n,
            amps: self.amps[..1 << n].to_vec(),
        }
    }

    pub fn apply_single(&mut self, q: usize, m: &[[Complex64; 2]; 2]) {
        let mask = 1usize << q;
        for i0 in (0..self.dim()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let (a, b) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a + m[0][1] * b;
            self.amps[i1] = m[1][0] * a + m[1][1] * b;
        }
    }

    /// Single-qubit `m` on `t` wherever qubit `c` equals `active`.
    fn apply_controlled(&mut self, c: usize, t: usize, active: usize, m: &[[Complex64; 2]; 2]) {
        let (cm, tm) = (1usize << c, 1usize << t);
        let want = if active == 1 { cm } else { 0 };
        for i0 in (0..self.dim()).filter(|i| i & tm == 0 && i & cm == want) {
            let i1 = i0 | tm;
            let (a, b) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a + m[0][1] * b;
            self.amps[i1] = m[1][0] * a + m[1][1] * b;
        }
    }

    pub fn apply_cnot(&mut self, c: usize, t: usize) {
        let (cm, tm) = (1usize << c, 1usize << t);
        for i0 in (0..self.dim()).filter(|i| i & tm == 0 && i & cm != 0) {
            self.amps.swap(i0, i0 | tm);
        }
    }

    pub fn apply_crx(&mut self, c: usize, t: usize, theta: f64, pol: Polarity) {
        self.apply_controlled(c, t, pol.active_bit(), &rx_matrix(theta));
    }

    /// Applies a unitary gate; measurement gates are rejected.
    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        if let Some(&q) = g.qubits().iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::InvalidGate(format!("{g:?} addresses qubit {q} of {}", self.n_qubits)));
        }
        match *g {
            Gate::Cnot { c, t } => self.apply_cnot(c, t),
            Gate::Crx { c, t, theta, pol } => self.apply_crx(c, t, theta, pol),
            Gate::MeasureReset { .. } => return Err(Error::MeasurementInUnitary),
            _ => self.apply_single(g.qubits()[0], &g.single_qubit_matrix().expect("single-qubit gate")),
        }
        Ok(())
    }

    /// Probability that qubit `q` reads 0.
    pub fn prob_zero(&self, q: usize) -> f64 {
        let mask = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects qubit `q` onto `outcome`, renormalises with the given outcome
    /// probability, and resets the qubit to `|0⟩`.
    pub fn project_and_reset(&mut self, q: usize, outcome: usize, prob: f64) {
        let mask = 1usize << q;
        let scale = 1.0 / prob.sqrt();
        for i0 in (0..self.dim()).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            let kept = if outcome == 0 { self.amps[i0] } else { self.amps[i1] };
            self.amps[i0] = kept * scale;
            self.amps[i1] = Complex64::new(0.0, 0.0);
        }
    }

    /// Computational-basis probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Exact `⟨ψ|H|ψ⟩`, including the identity coefficient.
pub fn expectation(psi: &StateVector, h: &QubitHamiltonian) -> Result<f64> {
    if psi.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits(),
            got: psi.n_qubits(),
        });
    }
    let amps = psi.amplitudes();
    let norm = psi.norm_sqr();
    let mut total = Complex64::new(h.identity_coeff() * norm, 0.0);
    for term in h.terms() {
        let mut e = Complex64::new(0.0, 0.0);
        for (row, a) in amps.iter().enumerate() {
            let (col, v) = term.string().row_entry(row);
            e += a.conj() * v * amps[col];
        }
        total += e * term.coeff();
    }
    if total.im.abs() > 1e-10 {
        return Err(Error::NonHermitian(total.im.abs()));
    }
    Ok(total.re)
}
