//! Transverse-field Ising and 1D Hubbard Hamiltonians, the Jordan-Wigner
//! map, and the initial-state circuits used with them.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::pauli::{PauliAxis, PauliString, PauliTerm, QubitHamiltonian};

/// Imaginary Pauli coefficients above this are treated as a non-Hermitian input.
pub const JW_IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Tim { j: f64, h: f64 },
    Hubbard { t: f64, u: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: Model,
    pub n_sites: usize,
    pub boundary: BoundaryCondition,
}

impl ModelSpec {
    pub fn new(model: Model, n_sites: usize, boundary: BoundaryCondition) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::InvalidArgument(format!("n_sites must be at least 2, got {n_sites}")));
        }
        Ok(Self {
            model,
            n_sites,
            boundary,
        })
    }

    pub fn n_qubits(&self) -> usize {
        match self.model {
            Model::Tim { .. } => self.n_sites,
            Model::Hubbard { .. } => 2 * self.n_sites,
        }
    }

    /// Nearest-neighbour bonds `(i, i+1)`, plus the wrap bond `(n-1, 0)` for
    /// periodic chains. The wrap is emitted even for two sites; callers decide
    /// whether a repeated bond is meaningful.
    fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        let mut b: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == BoundaryCondition::Periodic {
            b.push((n - 1, 0));
        }
        b
    }

    /// Qubit Hamiltonian of the model (Jordan-Wigner for Hubbard).
    pub fn hamiltonian(&self) -> Result<QubitHamiltonian> {
        match self.model {
            Model::Tim { .. } => build_tim(self),
            Model::Hubbard { .. } => jordan_wigner(&build_hubbard_fermionic(self)?, self.n_qubits()),
        }
    }

    /// State-preparation circuit: `|+⟩^n` for TIM, the two-Néel superposition
    /// at angle `theta` for Hubbard.
    pub fn initial_circuit(&self, theta: f64) -> Result<Circuit> {
        match self.model {
            Model::Tim { .. } => prepare_tim_initial(self.n_sites),
            Model::Hubbard { .. } => prepare_hubbard_initial(self.n_sites, theta),
        }
    }
}

/// `H = -J Σ Z_i Z_{i+1} - h Σ X_i`. A two-site periodic chain has its two
/// bonds merged into one `ZZ` term with coefficient `-2J`.
pub fn build_tim(spec: &ModelSpec) -> Result<QubitHamiltonian> {
    let Model::Tim { j, h } = spec.model else {
        return Err(Error::InvalidArgument("build_tim needs a TIM model".into()));
    };
    let n = spec.n_sites;
    let mut terms = Vec::with_capacity(2 * n);
    for (a, b) in spec.bonds() {
        let s = PauliString::from_sparse(n, &[(a, PauliAxis::Z), (b, PauliAxis::Z)])?;
        terms.push(PauliTerm::new(-j, s)?);
    }
    for i in 0..n {
        terms.push(PauliTerm::new(-h, PauliString::from_sparse(n, &[(i, PauliAxis::X)])?)?);
    }
    QubitHamiltonian::new(n, terms)
}

/// A coefficient times an ordered product of creation (`dagger = true`) and
/// annihilation operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermionOperatorProduct {
    pub factors: Vec<(usize, bool)>,
    pub coeff: f64,
}

impl FermionOperatorProduct {
    pub fn new(coeff: f64, factors: Vec<(usize, bool)>) -> Self {
        Self { factors, coeff }
    }
}

/// Spin-orbital index of `(site, spin)`; spin-up is even, spin-down odd.
pub fn hubbard_mode(site: usize, spin_down: bool) -> usize {
    2 * site + usize::from(spin_down)
}

/// `t Σ_{<ij>,σ} (c†_iσ c_jσ + c†_jσ c_iσ) + U Σ_i n_i↑ n_i↓`.
pub fn build_hubbard_fermionic(spec: &ModelSpec) -> Result<Vec<FermionOperatorProduct>> {
    let Model::Hubbard { t, u } = spec.model else {
        return Err(Error::InvalidArgument("build_hubbard_fermionic needs a Hubbard model".into()));
    };
    let mut ops = Vec::new();
    if t != 0.0 {
        let mut bonds = spec.bonds();
        // with two sites the wrap bond is the chain bond again
        if spec.n_sites == 2 {
            bonds.truncate(1);
        }
        for (i, j) in bonds {
            for down in [false, true] {
                let (a, b) = (hubbard_mode(i, down), hubbard_mode(j, down));
                ops.push(FermionOperatorProduct::new(t, vec![(a, true), (b, false)]));
                ops.push(FermionOperatorProduct::new(t, vec![(b, true), (a, false)]));
            }
        }
    }
    if u != 0.0 {
        for i in 0..spec.n_sites {
            let (up, dn) = (hubbard_mode(i, false), hubbard_mode(i, true));
            ops.push(FermionOperatorProduct::new(
                u,
                vec![(up, true), (up, false), (dn, true), (dn, false)],
            ));
        }
    }
    Ok(ops)
}

/// Pauli expansion of one ladder operator:
/// `c†_j = (X_j - iY_j)/2 · Z_{j-1}…Z_0`, `c_j = (X_j + iY_j)/2 · Z_{j-1}…Z_0`.
pub fn jw_ladder(mode: usize, dagger: bool, n_modes: usize) -> Result<[(Complex64, PauliString); 2]> {
    if mode >= n_modes {
        return Err(Error::ModeOutOfRange { mode, n_modes });
    }
    let with = |axis| {
        let mut ops: Vec<_> = (0..mode).map(|q| (q, PauliAxis::Z)).collect();
        ops.push((mode, axis));
        PauliString::from_sparse(n_modes, &ops)
    };
    let y_sign = if dagger { -0.5 } else { 0.5 };
    Ok([
        (Complex64::new(0.5, 0.0), with(PauliAxis::X)?),
        (Complex64::new(0.0, y_sign), with(PauliAxis::Y)?),
    ])
}

/// Maps fermionic products to a qubit Hamiltonian. Terms appear in the order
/// their strings are first produced by the expansion.
pub fn jordan_wigner(ops: &[FermionOperatorProduct], n_modes: usize) -> Result<QubitHamiltonian> {
    let mut order: Vec<PauliString> = Vec::new();
    let mut acc: HashMap<PauliString, Complex64> = HashMap::new();

    for op in ops {
        let mut partial = vec![(Complex64::new(op.coeff, 0.0), PauliString::identity(n_modes))];
        for &(mode, dagger) in &op.factors {
            let ladder = jw_ladder(mode, dagger, n_modes)?;
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (c, s) in &partial {
                for (lc, ls) in &ladder {
                    let (phase, prod) = s.mul(ls)?;
                    next.push((c * lc * phase, prod));
                }
            }
            partial = next;
        }
        for (c, s) in partial {
            match acc.get_mut(&s) {
                Some(v) => *v += c,
                None => {
                    order.push(s.clone());
                    acc.insert(s, c);
                }
            }
        }
    }

    let mut identity = 0.0;
    let mut terms = Vec::new();
    for s in order {
        let c = acc[&s];
        if c.im.abs() > JW_IMAG_TOL {
            return Err(Error::NonHermitian(c.im.abs()));
        }
        if c.re.abs() <= JW_IMAG_TOL {
            continue;
        }
        if s.is_identity() {
            identity += c.re;
        } else {
            terms.push(PauliTerm::new(c.re, s)?);
        }
    }
    QubitHamiltonian::with_identity(n_modes, identity, terms)
}

/// Hadamard on every qubit.
pub fn prepare_tim_initial(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    let mut c = Circuit::new(n, false);
    for q in 0..n {
        c.push(Gate::H { q })?;
    }
    Ok(c)
}

/// Prepares `(cos θ/2 − sin θ/2)/√2 |0110 0110…⟩ + (cos θ/2 + sin θ/2)/√2 |1001 1001…⟩`
/// over `2m` spin-orbitals, kets written with qubit 0 first.
///
/// H and Ry(θ) on qubit 0, X on every odd qubit, then a CNOT chain
/// `0→1→…→2m−1` copies the qubit-0 branch along the register.
pub fn prepare_hubbard_initial(m: usize, theta: f64) -> Result<Circuit> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one site".into()));
    }
    let n = 2 * m;
    let mut c = Circuit::new(n, false);
    c.push(Gate::H { q: 0 })?;
    c.push(Gate::Ry { q: 0, theta })?;
    for q in (1..n).step_by(2) {
        c.push(Gate::X { q })?;
    }
    for q in 0..n - 1 {
        c.push(Gate::Cnot { c: q, t: q + 1 })?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn tim(n: usize, j: f64, h: f64, b: BoundaryCondition) -> QubitHamiltonian {
        build_tim(&ModelSpec::new(Model::Tim { j, h }, n, b).unwrap()).unwrap()
    }

    fn hubbard(m: usize, t: f64, u: f64, b: BoundaryCondition) -> ModelSpec {
        ModelSpec::new(Model::Hubbard { t, u }, m, b).unwrap()
    }

    fn names(h: &QubitHamiltonian) -> Vec<(f64, String)> {
        h.terms().iter().map(|t| (t.coeff(), t.string().to_string())).collect()
    }

    #[test]
    fn tim_two_sites_merges_bonds() {
        let h = tim(2, 0.5, 0.1, BoundaryCondition::Periodic);
        assert_eq!(
            names(&h),
            vec![(-1.0, "ZZ".into()), (-0.1, "IX".into()), (-0.1, "XI".into())]
        );
        assert_eq!(h.identity_coeff(), 0.0);
    }

    #[test]
    fn tim_term_counts() {
        assert_eq!(tim(4, 1.0, 0.0, BoundaryCondition::Periodic).terms().len(), 4);
        let open = tim(3, 1.0, 0.2, BoundaryCondition::Open);
        assert_eq!(open.terms().iter().filter(|t| t.string().weight() == 2).count(), 2);
        assert_eq!(open.terms().len(), 5);
        for n in 3..9 {
            assert_eq!(tim(n, 0.5, 0.1, BoundaryCondition::Periodic).terms().len(), 2 * n);
            assert_eq!(tim(n, 0.5, 0.1, BoundaryCondition::Open).terms().len(), 2 * n - 1);
        }
        assert_eq!(tim(2, 0.5, 0.1, BoundaryCondition::Open).terms().len(), 3);
    }

    #[test]
    fn hubbard_product_counts() {
        let ops = build_hubbard_fermionic(&hubbard(2, -0.1, 0.1, BoundaryCondition::Periodic)).unwrap();
        assert_eq!(ops.iter().filter(|o| o.factors.len() == 2).count(), 4);
        assert_eq!(ops.iter().filter(|o| o.factors.len() == 4).count(), 2);
        let ops = build_hubbard_fermionic(&hubbard(2, 0.0, 0.1, BoundaryCondition::Periodic)).unwrap();
        assert_eq!(ops.len(), 2);
        let ops = build_hubbard_fermionic(&hubbard(3, -0.1, 0.1, BoundaryCondition::Periodic)).unwrap();
        assert_eq!(ops.iter().filter(|o| o.factors.len() == 2).count(), 12);
    }

    #[test]
    fn number_operator() {
        let h = jordan_wigner(&[FermionOperatorProduct::new(1.0, vec![(0, true), (0, false)])], 1).unwrap();
        assert_eq!(h.identity_coeff(), 0.5);
        assert_eq!(names(&h), vec![(-0.5, "Z".into())]);
    }

    #[test]
    fn hubbard_string_counts() {
        let h = hubbard(2, -0.1, 0.1, BoundaryCondition::Periodic).hamiltonian().unwrap();
        assert_eq!(h.terms().len(), 10);
        assert_eq!(h.n_strings(), 11);
        assert!((h.identity_coeff() - 0.05).abs() < 1e-15);
        assert!((h.one_norm() - 0.35).abs() < 1e-12);
        assert_eq!(hubbard(4, -0.1, 0.1, BoundaryCondition::Open).hamiltonian().unwrap().n_strings(), 25);
    }

    #[test]
    fn non_hermitian_product_is_rejected() {
        let r = jordan_wigner(&[FermionOperatorProduct::new(1.0, vec![(0, true), (1, false)])], 2);
        assert!(matches!(r, Err(Error::NonHermitian(_))));
        let r = jordan_wigner(&[FermionOperatorProduct::new(1.0, vec![(2, true)])], 2);
        assert!(matches!(r, Err(Error::ModeOutOfRange { mode: 2, n_modes: 2 })));
    }

    fn ladder_dense(mode: usize, dagger: bool, n: usize) -> DMatrix<Complex64> {
        jw_ladder(mode, dagger, n)
            .unwrap()
            .iter()
            .map(|(c, s)| s.to_dense().unwrap() * *c)
            .fold(DMatrix::zeros(1 << n, 1 << n), |a, b| a + b)
    }

    #[test]
    fn jw_anticommutation() {
        for n in 1..=4 {
            let dim = 1 << n;
            let id = DMatrix::<Complex64>::identity(dim, dim);
            for i in 0..n {
                for j in 0..n {
                    let (ci, cj) = (ladder_dense(i, false, n), ladder_dense(j, false, n));
                    let cdj = ladder_dense(j, true, n);
                    let ac = &ci * &cdj + &cdj * &ci;
                    let expect = if i == j { id.clone() } else { DMatrix::zeros(dim, dim) };
                    assert!((ac - expect).norm() < 1e-12, "{{c_{i}, c†_{j}}} n={n}");
                    assert!((&ci * &cj + &cj * &ci).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn jw_output_is_hermitian() {
        for m in 2..=3 {
            for b in [BoundaryCondition::Periodic, BoundaryCondition::Open] {
                for (t, u) in [(-0.1, 0.1), (0.7, -0.3), (0.0, 1.0)] {
                    let d = hubbard(m, t, u, b).hamiltonian().unwrap().to_dense().unwrap();
                    assert!((d.adjoint() - &d).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tim_initial_circuit() {
        assert_eq!(prepare_tim_initial(1).unwrap().gates(), &[Gate::H { q: 0 }]);
        let c = prepare_tim_initial(4).unwrap();
        assert_eq!(c.gates().len(), 4);
        assert!(c.gates().iter().all(|g| matches!(g, Gate::H { .. })));
    }

    #[test]
    fn hubbard_initial_state() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for theta in [0.0, 0.4, std::f64::consts::PI, 2.2] {
            let u = prepare_hubbard_initial(2, theta).unwrap().to_unitary().unwrap();
            let col = u.column(0);
            let (s, c) = (theta / 2.0).sin_cos();
            // q0-first "0110" has qubits 1 and 2 set: index 6; "1001" is index 9
            let mut expect = vec![Complex64::new(0.0, 0.0); 16];
            expect[6] = Complex64::new((c - s) * r, 0.0);
            expect[9] = Complex64::new((c + s) * r, 0.0);
            for k in 0..16 {
                assert!((col[k] - expect[k]).norm() < 1e-12, "theta={theta} k={k}");
            }
        }
    }

    #[test]
    fn hubbard_initial_is_half_filled() {
        for m in [2usize, 3, 4] {
            let u = prepare_hubbard_initial(m, 1.1).unwrap().to_unitary().unwrap();
            for (idx, a) in u.column(0).iter().enumerate() {
                if a.norm() > 1e-12 {
                    assert_eq!(idx.count_ones() as usize, m);
                }
            }
        }
    }
}
