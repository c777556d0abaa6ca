//! Lowering Pauli terms to circuits: real-time Pauli gadgets, non-unitary
//! imaginary-time gadgets, Trotterised PITE circuits and the LCU-style
//! circuit used for cost comparison.

use crate::circuit::{Circuit, Gate, Polarity};
use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliString, PauliTerm, QubitHamiltonian};

/// Parameters of one imaginary-time gadget for `e^{-|c|Δτ} e^{-cΔτσ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetPlan {
    pub term: PauliTerm,
    pub delta_tau: f64,
    /// Ancilla rotation angle, `2·acos(e^{-2|c|Δτ})`.
    pub phi: f64,
    pub polarity: Polarity,
}

impl GadgetPlan {
    pub fn new(term: PauliTerm, delta_tau: f64) -> Result<Self> {
        if !(delta_tau.is_finite() && delta_tau > 0.0) {
            return Err(Error::InvalidArgument(format!("delta_tau must be positive, got {delta_tau}")));
        }
        if term.string().is_identity() {
            return Err(Error::IdentityString);
        }
        let c = term.coeff();
        let phi = 2.0 * (-2.0 * c.abs() * delta_tau).exp().acos();
        // the rotation fires on the parity eigenvalue that ITE suppresses
        let polarity = if c < 0.0 { Polarity::OnOne } else { Polarity::OnZero };
        Ok(Self {
            term,
            delta_tau,
            phi,
            polarity,
        })
    }
}

/// First-order Trotter schedule: `n_steps` repetitions of the grouped terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterSchedule {
    pub groups: Vec<Vec<PauliTerm>>,
    pub n_steps: usize,
    pub delta_tau: f64,
}

impl TrotterSchedule {
    pub fn new(h: &QubitHamiltonian, n_steps: usize, delta_tau: f64) -> Result<Self> {
        if !(delta_tau.is_finite() && delta_tau > 0.0) {
            return Err(Error::InvalidArgument(format!("delta_tau must be positive, got {delta_tau}")));
        }
        Ok(Self {
            groups: h.partition_commuting(),
            n_steps,
            delta_tau,
        })
    }

    pub fn total_tau(&self) -> f64 {
        self.n_steps as f64 * self.delta_tau
    }

    /// Terms of one step in application order.
    pub fn ordered_terms(&self) -> impl Iterator<Item = &PauliTerm> {
        self.groups.iter().flatten()
    }

    pub fn with_steps(&self, n_steps: usize) -> Self {
        Self {
            n_steps,
            ..self.clone()
        }
    }
}

/// Rotates each non-identity axis onto Z (`inverse = false`) or back.
fn push_basis_change(c: &mut Circuit, s: &PauliString, inverse: bool) -> Result<()> {
    for q in s.support() {
        match (s.axis(q), inverse) {
            (PauliAxis::X, _) => c.push(Gate::H { q })?,
            (PauliAxis::Y, false) => {
                c.push(Gate::Sdg { q })?;
                c.push(Gate::H { q })?;
            }
            (PauliAxis::Y, true) => {
                c.push(Gate::H { q })?;
                c.push(Gate::S { q })?;
            }
            _ => {}
        }
    }
    Ok(())
}

/// CNOT chain over `support` collecting the parity on its last qubit.
fn push_ladder(c: &mut Circuit, support: &[usize], reverse: bool) -> Result<()> {
    let pairs: Vec<_> = support.windows(2).map(|w| (w[0], w[1])).collect();
    if reverse {
        for &(a, b) in pairs.iter().rev() {
            c.push(Gate::Cnot { c: a, t: b })?;
        }
    } else {
        for &(a, b) in &pairs {
            c.push(Gate::Cnot { c: a, t: b })?;
        }
    }
    Ok(())
}

/// Wraps `core` (acting on the parity qubit) in basis change and ladder.
fn push_conjugated(
    c: &mut Circuit,
    s: &PauliString,
    core: impl FnOnce(&mut Circuit, usize) -> Result<()>,
) -> Result<()> {
    let support = s.support();
    let last = *support.last().ok_or(Error::IdentityString)?;
    push_basis_change(c, s, false)?;
    push_ladder(c, &support, false)?;
    core(c, last)?;
    push_ladder(c, &support, true)?;
    push_basis_change(c, s, true)
}

/// `e^{-i c Δt σ}` as basis change, CNOT ladder, `Rz(2cΔt)`, and the mirror.
pub fn rte_pauli_gadget(term: &PauliTerm, delta_t: f64) -> Result<Circuit> {
    let s = term.string();
    let mut c = Circuit::new(s.len(), false);
    let theta = 2.0 * term.coeff() * delta_t;
    push_conjugated(&mut c, s, |c, q| c.push(Gate::Rz { q, theta }))?;
    Ok(c)
}

fn push_ite_gadget(c: &mut Circuit, plan: &GadgetPlan, measure: bool) -> Result<()> {
    let anc = c
        .ancilla()
        .ok_or_else(|| Error::InvalidGate("imaginary-time gadget needs an ancilla".into()))?;
    push_conjugated(c, plan.term.string(), |c, q| {
        c.push(Gate::Crx {
            c: q,
            t: anc,
            theta: plan.phi,
            pol: plan.polarity,
        })?;
        if measure {
            c.push(Gate::MeasureReset { q: anc })?;
        }
        Ok(())
    })
}

/// Non-unitary gadget: post-selecting the ancilla on `|0⟩` applies
/// `e^{-|c|Δτ} e^{-cΔτσ}` to the system.
pub fn ite_pauli_gadget(plan: &GadgetPlan) -> Result<Circuit> {
    let mut c = Circuit::new(plan.term.string().len(), true);
    push_ite_gadget(&mut c, plan, true)?;
    Ok(c)
}

/// The same gadget without its measurement; its ancilla-`|0⟩` block is the
/// scaled imaginary-time operator.
pub fn ite_block_encoding(plan: &GadgetPlan) -> Result<Circuit> {
    let mut c = Circuit::new(plan.term.string().len(), true);
    push_ite_gadget(&mut c, plan, false)?;
    Ok(c)
}

/// One Trotter step of imaginary-time gadgets, one per non-identity term.
pub fn trotter_step_circuit(h: &QubitHamiltonian, schedule: &TrotterSchedule) -> Result<Circuit> {
    let mut c = Circuit::new(h.n_qubits(), true);
    for term in schedule.ordered_terms() {
        push_ite_gadget(&mut c, &GadgetPlan::new(term.clone(), schedule.delta_tau)?, true)?;
    }
    Ok(c)
}

/// `initial` followed by `n_steps` Trotter steps sharing one ancilla.
pub fn trotter_pite_circuit(
    h: &QubitHamiltonian,
    schedule: &TrotterSchedule,
    initial: &Circuit,
) -> Result<Circuit> {
    if initial.n_system() != h.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits(),
            got: initial.n_system(),
        });
    }
    let mut c = initial.clone();
    if schedule.n_steps == 0 {
        return Ok(c);
    }
    let step = trotter_step_circuit(h, schedule)?;
    for _ in 0..schedule.n_steps {
        c.append(&step)?;
    }
    Ok(c)
}

/// LCU-style PITE circuit for gate counting. Each step prepares the ancilla
/// with H, applies a controlled and an anti-controlled `Rz` per term inside
/// one shared ladder, and closes with H and a single measurement. Controlled
/// `Rz` is written as `H · CRx · H` on the parity qubit. The rotation angles
/// are nominal; this circuit is not meant to be simulated.
pub fn lcu_pite_circuit(h: &QubitHamiltonian, schedule: &TrotterSchedule) -> Result<Circuit> {
    let n = h.n_qubits();
    let anc = n;
    let mut c = Circuit::new(n, true);
    for _ in 0..schedule.n_steps {
        c.push(Gate::H { q: anc })?;
        for term in schedule.ordered_terms() {
            let theta = 2.0 * term.coeff() * schedule.delta_tau;
            push_conjugated(&mut c, term.string(), |c, q| {
                for (pol, angle) in [(Polarity::OnOne, theta), (Polarity::OnZero, -theta)] {
                    c.push(Gate::H { q })?;
                    c.push(Gate::Crx {
                        c: anc,
                        t: q,
                        theta: angle,
                        pol,
                    })?;
                    c.push(Gate::H { q })?;
                }
                Ok(())
            })?;
        }
        c.push(Gate::H { q: anc })?;
        c.push(Gate::MeasureReset { q: anc })?;
    }
    Ok(c)
}

/// Overall block-encoding scale `e^{-rΔτλ}` of the Trotterised circuit.
pub fn trotter_scaling(h: &QubitHamiltonian, schedule: &TrotterSchedule) -> f64 {
    (-schedule.total_tau() * h.one_norm()).exp()
}
