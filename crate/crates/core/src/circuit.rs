//! Gate-level circuits over `n_system` qubits plus an optional reusable
//! ancilla at index `n_system`, with CNOT cost models.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::check_dense_cap;

/// Which control value activates a controlled rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Polarity {
    OnZero,
    OnOne,
}

impl Polarity {
    pub fn active_bit(self) -> usize {
        match self {
            Self::OnZero => 0,
            Self::OnOne => 1,
        }
    }
}

impl TryFrom<u8> for Polarity {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Self::OnZero),
            1 => Ok(Self::OnOne),
            other => Err(format!("polarity must be 0 or 1, got {other}")),
        }
    }
}

impl From<Polarity> for u8 {
    fn from(p: Polarity) -> u8 {
        p.active_bit() as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "g")]
pub enum Gate {
    H { q: usize },
    X { q: usize },
    Z { q: usize },
    S { q: usize },
    #[serde(rename = "SDG")]
    Sdg { q: usize },
    #[serde(rename = "RX")]
    Rx { q: usize, theta: f64 },
    #[serde(rename = "RY")]
    Ry { q: usize, theta: f64 },
    #[serde(rename = "RZ")]
    Rz { q: usize, theta: f64 },
    #[serde(rename = "CNOT")]
    Cnot { c: usize, t: usize },
    #[serde(rename = "CRX")]
    Crx {
        c: usize,
        t: usize,
        theta: f64,
        pol: Polarity,
    },
    /// Projective measurement of the ancilla; outcome 0 is the expected one.
    /// The qubit is left in `|0⟩` afterwards.
    #[serde(rename = "MR")]
    MeasureReset { q: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H { q }
            | Gate::X { q }
            | Gate::Z { q }
            | Gate::S { q }
            | Gate::Sdg { q }
            | Gate::Rx { q, .. }
            | Gate::Ry { q, .. }
            | Gate::Rz { q, .. }
            | Gate::MeasureReset { q } => vec![q],
            Gate::Cnot { c, t } | Gate::Crx { c, t, .. } => vec![c, t],
        }
    }

    /// CNOTs in the gate's decomposition; a controlled rotation costs two.
    pub fn cnot_cost(&self) -> usize {
        match self {
            Gate::Cnot { .. } => 1,
            Gate::Crx { .. } => 2,
            _ => 0,
        }
    }

    fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { theta, .. } | Gate::Ry { theta, .. } | Gate::Rz { theta, .. } | Gate::Crx { theta, .. } => {
                Some(theta)
            }
            _ => None,
        }
    }

    /// Row-major 2x2 matrix for single-qubit unitaries.
    pub fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Some(match *self {
            Gate::H { .. } => [[one * r, one * r], [one * r, -one * r]],
            Gate::X { .. } => [[z, one], [one, z]],
            Gate::Z { .. } => [[one, z], [z, -one]],
            Gate::S { .. } => [[one, z], [z, i]],
            Gate::Sdg { .. } => [[one, z], [z, -i]],
            Gate::Rx { theta, .. } => rx_matrix(theta),
            Gate::Ry { theta, .. } => {
                let (s, c) = (theta / 2.0).sin_cos();
                [[one * c, -one * s], [one * s, one * c]]
            }
            Gate::Rz { theta, .. } => {
                let e = Complex64::from_polar(1.0, theta / 2.0);
                [[e.conj(), z], [z, e]]
            }
            _ => return None,
        })
    }
}

pub(crate) fn rx_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let c = Complex64::new(c, 0.0);
    let ms = Complex64::new(0.0, -s);
    [[c, ms], [ms, c]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_system: usize,
    has_ancilla: bool,
    gates: Vec<Gate>,
    measure_count: usize,
}

impl Circuit {
    pub fn new(n_system: usize, has_ancilla: bool) -> Self {
        Self {
            n_system,
            has_ancilla,
            gates: Vec::new(),
            measure_count: 0,
        }
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn has_ancilla(&self) -> bool {
        self.has_ancilla
    }

    pub fn ancilla(&self) -> Option<usize> {
        self.has_ancilla.then_some(self.n_system)
    }

    /// Total number of qubits including the ancilla.
    pub fn width(&self) -> usize {
        self.n_system + usize::from(self.has_ancilla)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn measure_count(&self) -> usize {
        self.measure_count
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let qs = gate.qubits();
        for &q in &qs {
            if q >= self.width() {
                return Err(Error::InvalidGate(format!(
                    "{gate:?} addresses qubit {q} in a {}-qubit circuit",
                    self.width()
                )));
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidGate(format!("{gate:?}: control equals target")));
        }
        if let Some(theta) = gate.angle() {
            if !theta.is_finite() {
                return Err(Error::InvalidGate(format!("{gate:?}: non-finite angle")));
            }
        }
        if let Gate::MeasureReset { q } = gate {
            if Some(q) != self.ancilla() {
                return Err(Error::InvalidGate(format!(
                    "measure-reset on qubit {q}, which is not the ancilla"
                )));
            }
            self.measure_count += 1;
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other`, which must act on the same system register.
    /// The ancilla is added if `other` uses one.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_system != self.n_system {
            return Err(Error::DimensionMismatch {
                expected: self.n_system,
                got: other.n_system,
            });
        }
        self.has_ancilla |= other.has_ancilla;
        self.gates.reserve(other.gates.len());
        for &g in &other.gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().map(Gate::cnot_cost).sum()
    }

    /// Longest chain of CNOTs after expanding each controlled rotation into
    /// two CNOTs on the same pair, with ASAP scheduling. Single-qubit gates
    /// and measurements do not add layers.
    pub fn cnot_depth(&self) -> usize {
        let mut level = vec![0usize; self.width()];
        for g in &self.gates {
            if let Gate::Cnot { c, t } | Gate::Crx { c, t, .. } = *g {
                let next = level[c].max(level[t]) + g.cnot_cost();
                level[c] = next;
                level[t] = next;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// Dense unitary of the whole circuit (little-endian), built by
    /// left-multiplying embedded gate matrices in circuit order.
    pub fn to_unitary(&self) -> Result<DMatrix<Complex64>> {
        if self.measure_count > 0 {
            return Err(Error::MeasurementInUnitary);
        }
        let n = self.width();
        check_dense_cap("circuit unitary", n)?;
        let mut u = DMatrix::<Complex64>::identity(1 << n, 1 << n);
        for g in &self.gates {
            let (qubits, local) = local_matrix(g);
            u = embed(&qubits, &local, n) * u;
        }
        Ok(u)
    }

    /// One JSON object per line, one line per gate.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            let _ = writeln!(out, "{}", serde_json::to_string(g).expect("gate serialises"));
        }
        out
    }

    pub fn from_json_lines(n_system: usize, has_ancilla: bool, text: &str) -> Result<Self> {
        let mut c = Self::new(n_system, has_ancilla);
        for (k, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let g: Gate = serde_json::from_str(line)
                .map_err(|e| Error::InvalidGate(format!("line {}: {e}", k + 1)))?;
            c.push(g)?;
        }
        Ok(c)
    }
}

/// Gate matrix on its own qubits; local index bit `k` is the state of `qubits[k]`.
fn local_matrix(g: &Gate) -> (Vec<usize>, DMatrix<Complex64>) {
    let qubits = g.qubits();
    if let Some(m) = g.single_qubit_matrix() {
        return (qubits, DMatrix::from_fn(2, 2, |r, c| m[r][c]));
    }
    let one = Complex64::new(1.0, 0.0);
    let mut m = DMatrix::zeros(4, 4);
    match *g {
        Gate::Cnot { .. } => {
            for col in 0..4 {
                let row = if col & 1 == 1 { col ^ 2 } else { col };
                m[(row, col)] = one;
            }
        }
        Gate::Crx { theta, pol, .. } => {
            let rx = rx_matrix(theta);
            for ctrl in 0..2 {
                for tr in 0..2 {
                    for tc in 0..2 {
                        let v = if ctrl == pol.active_bit() {
                            rx[tr][tc]
                        } else if tr == tc {
                            one
                        } else {
                            continue;
                        };
                        m[(ctrl | (tr << 1), ctrl | (tc << 1))] = v;
                    }
                }
            }
        }
        _ => unreachable!("single-qubit and measurement gates handled above"),
    }
    (qubits, m)
}

fn embed(qubits: &[usize], local: &DMatrix<Complex64>, n: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n;
    let mask: usize = qubits.iter().map(|&q| 1 << q).sum();
    let sub = |idx: usize| {
        qubits
            .iter()
            .enumerate()
            .map(|(k, &q)| ((idx >> q) & 1) << k)
            .sum::<usize>()
    };
    DMatrix::from_fn(dim, dim, |r, c| {
        if r & !mask != c & !mask {
            Complex64::new(0.0, 0.0)
        } else {
            local[(sub(r), sub(c))]
        }
    })
}

/// One row of a circuit-complexity table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub n_sites: usize,
    pub n_p: usize,
    pub width: usize,
    pub n_t: usize,
    pub cnot_count: usize,
    pub cnot_depth: usize,
}

impl ComplexityRow {
    pub const CSV_HEADER: &'static str = "n_sites,n_p,width,n_t,g,d";

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n_sites, self.n_p, self.width, self.n_t, self.cnot_count, self.cnot_depth
        )
    }
}
