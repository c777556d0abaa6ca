//! Pauli strings, weighted terms and qubit Hamiltonians.
//!
//! Qubit `k` of a [`PauliString`] is stored at `axes[k]`; the basis index of a
//! dense matrix is little-endian, so qubit 0 is the least-significant bit.
//! The text form runs the other way: the leftmost character acts on the
//! highest-index qubit, so `"ZXI"` is `Z_2 X_1 I_0`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register for which dense matrices are built.
pub const DENSE_QUBIT_CAP: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const IM: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 4] = [PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(Self::I),
            'X' => Ok(Self::X),
            'Y' => Ok(Self::Y),
            'Z' => Ok(Self::Z),
            other => Err(Error::InvalidPauliChar(other)),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }

    pub fn is_identity(self) -> bool {
        self == Self::I
    }

    /// Single-qubit product `self · other` as `(phase, axis)`.
    pub fn mul(self, other: Self) -> (Complex64, Self) {
        use PauliAxis::*;
        match (self, other) {
            (I, p) | (p, I) => (ONE, p),
            (a, b) if a == b => (ONE, I),
            (X, Y) => (IM, Z),
            (Y, Z) => (IM, X),
            (Z, X) => (IM, Y),
            (Y, X) => (-IM, Z),
            (Z, Y) => (-IM, X),
            (X, Z) => (-IM, Y),
            _ => unreachable!(),
        }
    }

    /// Row-major 2x2 matrix.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Self::I => [[ONE, ZERO], [ZERO, ONE]],
            Self::X => [[ZERO, ONE], [ONE, ZERO]],
            Self::Y => [[ZERO, -IM], [IM, ZERO]],
            Self::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

/// A tensor product of single-qubit Pauli operators on a fixed register.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    axes: Vec<PauliAxis>,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            axes: vec![PauliAxis::I; n_qubits],
        }
    }

    /// Builds a string from axes indexed by qubit (`axes[0]` acts on qubit 0).
    pub fn from_axes(axes: Vec<PauliAxis>) -> Self {
        Self { axes }
    }

    /// Builds a string that is the identity except at the listed qubits.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, PauliAxis)]) -> Result<Self> {
        let mut axes = vec![PauliAxis::I; n_qubits];
        for &(q, axis) in ops {
            if q >= n_qubits {
                return Err(Error::InvalidArgument(format!(
                    "qubit {q} outside a {n_qubits}-qubit register"
                )));
            }
            axes[q] = axis;
        }
        Ok(Self { axes })
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    pub fn axis(&self, qubit: usize) -> PauliAxis {
        self.axes[qubit]
    }

    /// Number of non-identity positions.
    pub fn weight(&self) -> usize {
        self.axes.iter().filter(|a| !a.is_identity()).count()
    }

    /// Non-identity qubits in ascending order.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_identity())
            .map(|(q, _)| q)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.axes.iter().all(|a| a.is_identity())
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// Two strings commute iff they anticommute on an even number of qubits.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        let clashes = self
            .axes
            .iter()
            .zip(&other.axes)
            .filter(|(a, b)| !a.is_identity() && !b.is_identity() && a != b)
            .count();
        Ok(clashes % 2 == 0)
    }

    /// Product `self · other` as `(phase, string)`.
    pub fn mul(&self, other: &Self) -> Result<(Complex64, Self)> {
        self.check_len(other)?;
        let mut phase = ONE;
        let axes = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(&a, &b)| {
                let (p, c) = a.mul(b);
                phase *= p;
                c
            })
            .collect();
        Ok((phase, Self { axes }))
    }

    /// Bit mask of qubits whose axis flips the computational basis (X or Y).
    fn flip_mask(&self) -> usize {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, PauliAxis::X | PauliAxis::Y))
            .fold(0, |m, (q, _)| m | (1 << q))
    }

    /// The string is a signed permutation matrix: row `i` holds one non-zero
    /// entry at column `i ^ flip_mask`. Returns that column and value.
    pub(crate) fn row_entry(&self, row: usize) -> (usize, Complex64) {
        let mut value = ONE;
        for (q, axis) in self.axes.iter().enumerate() {
            let bit = (row >> q) & 1;
            value *= match (axis, bit) {
                (PauliAxis::Y, 0) => -IM,
                (PauliAxis::Y, _) => IM,
                (PauliAxis::Z, 1) => -ONE,
                _ => ONE,
            };
        }
        (row ^ self.flip_mask(), value)
    }

    /// Dense `2^n x 2^n` matrix in little-endian ordering.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        check_dense_cap("pauli string", self.len())?;
        let dim = 1usize << self.len();
        let mut m = DMatrix::zeros(dim, dim);
        for row in 0..dim {
            let (col, v) = self.row_entry(row);
            m[(row, col)] = v;
        }
        Ok(m)
    }
}

pub(crate) fn check_dense_cap(what: &'static str, n_qubits: usize) -> Result<()> {
    if n_qubits > DENSE_QUBIT_CAP {
        return Err(Error::TooManyQubits {
            what,
            n_qubits,
            cap: DENSE_QUBIT_CAP,
        });
    }
    Ok(())
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes = s
            .chars()
            .rev()
            .map(PauliAxis::from_char)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axes })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.axes.iter().rev() {
            write!(f, "{}", a.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A real-weighted Pauli string `c · σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    coeff: f64,
    string: PauliString,
}

impl PauliTerm {
    pub fn new(coeff: f64, string: PauliString) -> Result<Self> {
        if !coeff.is_finite() {
            return Err(Error::NonFiniteCoefficient(coeff));
        }
        Ok(Self { coeff, string })
    }

    /// Parses the text form of the string; panics on malformed input, so only
    /// use it with literals.
    pub fn parse(coeff: f64, string: &str) -> Self {
        Self::new(coeff, string.parse().expect("valid pauli literal")).expect("finite literal")
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn string(&self) -> &PauliString {
        &self.string
    }
}

/// `H = identity_coeff · I + Σ_k c_k σ_k` with distinct, non-identity `σ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HamiltonianRepr", into = "HamiltonianRepr")]
pub struct QubitHamiltonian {
    n_qubits: usize,
    identity_coeff: f64,
    terms: Vec<PauliTerm>,
}

impl QubitHamiltonian {
    /// Merges repeated strings by summing their coefficients, moves the
    /// all-identity component into `identity_coeff` and drops terms whose
    /// merged coefficient is zero. First-occurrence order is kept.
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        Self::with_identity(n_qubits, 0.0, terms)
    }

    pub fn with_identity(
        n_qubits: usize,
        identity_coeff: f64,
        terms: impl IntoIterator<Item = PauliTerm>,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("hamiltonian needs at least one qubit".into()));
        }
        if !identity_coeff.is_finite() {
            return Err(Error::NonFiniteCoefficient(identity_coeff));
        }
        let mut identity = identity_coeff;
        let mut merged: Vec<PauliTerm> = Vec::new();
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        for term in terms {
            if term.string.len() != n_qubits {
                return Err(Error::LengthMismatch {
                    left: n_qubits,
                    right: term.string.len(),
                });
            }
            if term.string.is_identity() {
                identity += term.coeff;
                continue;
            }
            match index.get(&term.string) {
                Some(&k) => merged[k].coeff += term.coeff,
                None => {
                    index.insert(term.string.clone(), merged.len());
                    merged.push(term);
                }
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        Ok(Self {
            n_qubits,
            identity_coeff: identity,
            terms: merged,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn identity_coeff(&self) -> f64 {
        self.identity_coeff
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Number of distinct strings, counting `I^⊗n` when its coefficient is non-zero.
    pub fn n_strings(&self) -> usize {
        self.terms.len() + usize::from(self.identity_coeff != 0.0)
    }

    /// `λ = Σ_k |c_k|` over the non-identity terms.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    /// Greedy first-fit partition into mutually commuting groups.
    ///
    /// Terms are visited by descending `|c|`; equal magnitudes keep their
    /// construction order. Each term joins the first group it commutes with
    /// entirely, otherwise opens a new group. Group order is the order in
    /// which the Trotter step applies them.
    pub fn partition_commuting(&self) -> Vec<Vec<PauliTerm>> {
        let mut order: Vec<&PauliTerm> = self.terms.iter().collect();
        order.sort_by(|a, b| b.coeff.abs().total_cmp(&a.coeff.abs()));

        let mut groups: Vec<Vec<PauliTerm>> = Vec::new();
        for term in order {
            let slot = groups.iter_mut().find(|g| {
                g.iter()
                    .all(|other| other.string.commutes(&term.string).expect("equal lengths"))
            });
            match slot {
                Some(g) => g.push(term.clone()),
                None => groups.push(vec![term.clone()]),
            }
        }
        groups
    }

    /// Dense matrix including `identity_coeff · I`.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        check_dense_cap("hamiltonian", self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::from_diagonal_element(dim, dim, Complex64::from(self.identity_coeff));
        for term in &self.terms {
            for row in 0..dim {
                let (col, v) = term.string.row_entry(row);
                m[(row, col)] += v * term.coeff;
            }
        }
        Ok(m)
    }
}

#[derive(Serialize, Deserialize)]
struct HamiltonianRepr {
    n_qubits: usize,
    identity_coeff: f64,
    terms: Vec<PauliTerm>,
}

impl TryFrom<HamiltonianRepr> for QubitHamiltonian {
    type Error = Error;

    fn try_from(r: HamiltonianRepr) -> Result<Self> {
        Self::with_identity(r.n_qubits, r.identity_coeff, r.terms)
    }
}

impl From<QubitHamiltonian> for HamiltonianRepr {
    fn from(h: QubitHamiltonian) -> Self {
        Self {
            n_qubits: h.n_qubits,
            identity_coeff: h.identity_coeff,
            terms: h.terms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    /// Independent construction: explicit Kronecker products, highest qubit leftmost.
    fn kron_oracle(p: &PauliString) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, ONE);
        for axis in p.axes().iter().rev() {
            let a = axis.matrix();
            let small = DMatrix::from_fn(2, 2, |r, c| a[r][c]);
            m = m.kronecker(&small);
        }
        m
    }

    fn commutator_vanishes(a: &PauliString, b: &PauliString) -> bool {
        let (ma, mb) = (kron_oracle(a), kron_oracle(b));
        let c = &ma * &mb - &mb * &ma;
        c.iter().all(|z| z.norm() < 1e-12)
    }

    fn all_strings(n: usize) -> Vec<PauliString> {
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
            .collect()
    }

    #[test]
    fn text_form_is_big_endian() {
        let p = ps("ZXI");
        assert_eq!(p.axis(0), PauliAxis::I);
        assert_eq!(p.axis(1), PauliAxis::X);
        assert_eq!(p.axis(2), PauliAxis::Z);
        assert_eq!(p.to_string(), "ZXI");
        assert_eq!(p.weight(), 2);
        assert_eq!(p.support(), vec![1, 2]);
        assert!(matches!("XQ".parse::<PauliString>(), Err(Error::InvalidPauliChar('Q'))));
    }

    #[test]
    fn commutes_examples() {
        assert!(ps("II").commutes(&ps("XY")).unwrap());
        assert!(!ps("ZZ").commutes(&ps("XI")).unwrap());
        assert!(ps("XX").commutes(&ps("ZZ")).unwrap());
        assert!(!commutator_vanishes(&ps("ZZ"), &ps("XI")));
        assert!(commutator_vanishes(&ps("XX"), &ps("ZZ")));
        assert!(matches!(
            ps("XX").commutes(&ps("X")),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn commutes_matches_dense_commutator_exhaustively_on_two_qubits() {
        let all = all_strings(2);
        for a in &all {
            for b in &all {
                assert_eq!(a.commutes(b).unwrap(), commutator_vanishes(a, b), "{a} {b}");
            }
        }
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        proptest::collection::vec(0usize..4, n)
            .prop_map(|v| PauliString::from_axes(v.into_iter().map(|k| PauliAxis::ALL[k]).collect()))
    }

    proptest! {
        #[test]
        fn commutes_matches_dense_commutator(n in 3usize..=4, seed in any::<u64>()) {
            let strings = all_strings(n);
            let a = &strings[(seed % strings.len() as u64) as usize];
            let b = &strings[((seed >> 20) % strings.len() as u64) as usize];
            prop_assert_eq!(a.commutes(b).unwrap(), commutator_vanishes(a, b));
        }

        #[test]
        fn dense_matches_kronecker(p in arb_string(3)) {
            let d = p.to_dense().unwrap();
            prop_assert!((d - kron_oracle(&p)).norm() < 1e-14);
        }

        #[test]
        fn product_matches_dense_product(a in arb_string(3), b in arb_string(3)) {
            let (phase, c) = a.mul(&b).unwrap();
            let lhs = kron_oracle(&a) * kron_oracle(&b);
            let rhs = kron_oracle(&c) * phase;
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn one_norm_ignores_order_and_sign(coeffs in proptest::collection::vec(-2.0f64..2.0, 1..6), flip in any::<u8>()) {
            let strings = ["XI", "IZ", "ZZ", "YX", "XY"];
            let terms: Vec<_> = coeffs.iter().zip(strings).map(|(&c, s)| PauliTerm::parse(c, s)).collect();
            let h = QubitHamiltonian::new(2, terms.clone()).unwrap();
            let flipped: Vec<_> = terms.iter().rev().enumerate().map(|(k, t)| {
                let sign = if (flip >> k) & 1 == 1 { -1.0 } else { 1.0 };
                PauliTerm::new(sign * t.coeff(), t.string().clone()).unwrap()
            }).collect();
            let g = QubitHamiltonian::new(2, flipped).unwrap();
            prop_assert!((h.one_norm() - g.one_norm()).abs() < 1e-12);
        }

        #[test]
        fn partition_is_a_commuting_permutation(coeffs in proptest::collection::vec(-1.0f64..1.0, 1..10), strings in proptest::collection::vec(arb_string(3), 1..10)) {
            let terms: Vec<_> = coeffs.iter().zip(&strings).map(|(&c, s)| PauliTerm::new(c, s.clone()).unwrap()).collect();
            let h = QubitHamiltonian::new(3, terms).unwrap();
            let groups = h.partition_commuting();
            for g in &groups {
                for a in g {
                    for b in g {
                        prop_assert!(a.string().commutes(b.string()).unwrap());
                    }
                }
            }
            let mut flat: Vec<String> = groups.iter().flatten().map(|t| format!("{}{}", t.string(), t.coeff())).collect();
            let mut orig: Vec<String> = h.terms().iter().map(|t| format!("{}{}", t.string(), t.coeff())).collect();
            flat.sort();
            orig.sort();
            prop_assert_eq!(flat, orig);
        }

        #[test]
        fn duplicates_merge(c in -1.0f64..1.0, d in -1.0f64..1.0) {
            let h = QubitHamiltonian::new(2, [PauliTerm::parse(c, "XZ"), PauliTerm::parse(0.3, "ZZ"), PauliTerm::parse(d, "XZ")]).unwrap();
            let xz: Vec<_> = h.terms().iter().filter(|t| t.string().to_string() == "XZ").collect();
            if c + d == 0.0 {
                prop_assert!(xz.is_empty());
            } else {
                prop_assert_eq!(xz.len(), 1);
                prop_assert_eq!(xz[0].coeff(), c + d);
            }
        }
    }

    #[test]
    fn cancelling_duplicates_vanish() {
        let h = QubitHamiltonian::new(1, [PauliTerm::parse(0.5, "X"), PauliTerm::parse(-0.5, "X")]).unwrap();
        assert!(h.terms().is_empty());
    }

    #[test]
    fn one_norm_examples() {
        assert_eq!(QubitHamiltonian::new(2, []).unwrap().one_norm(), 0.0);
        let h = QubitHamiltonian::new(
            2,
            [PauliTerm::parse(-1.0, "ZZ"), PauliTerm::parse(-0.1, "IX"), PauliTerm::parse(-0.1, "XI")],
        )
        .unwrap();
        assert!((h.one_norm() - 1.2).abs() < 1e-15);
        let h = QubitHamiltonian::new(3, [PauliTerm::parse(0.5, "ZZZ")]).unwrap();
        assert_eq!(h.one_norm(), 0.5);
    }

    #[test]
    fn identity_terms_move_to_identity_coeff() {
        let h = QubitHamiltonian::with_identity(2, 0.25, [PauliTerm::parse(0.5, "II"), PauliTerm::parse(1.0, "ZI")]).unwrap();
        assert_eq!(h.identity_coeff(), 0.75);
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.n_strings(), 2);
        assert_eq!(h.one_norm(), 1.0);
    }

    #[test]
    fn partition_examples() {
        let h = QubitHamiltonian::new(
            2,
            [PauliTerm::parse(-0.1, "IX"), PauliTerm::parse(-1.0, "ZZ"), PauliTerm::parse(-0.1, "XI")],
        )
        .unwrap();
        let g = h.partition_commuting();
        let names: Vec<Vec<String>> = g.iter().map(|g| g.iter().map(|t| t.string().to_string()).collect()).collect();
        assert_eq!(names, vec![vec!["ZZ".to_string()], vec!["IX".to_string(), "XI".to_string()]]);

        let h = QubitHamiltonian::new(3, [PauliTerm::parse(1.0, "ZZI"), PauliTerm::parse(0.3, "IZZ"), PauliTerm::parse(2.0, "ZIZ")]).unwrap();
        assert_eq!(h.partition_commuting().len(), 1);

        let h = QubitHamiltonian::new(1, [PauliTerm::parse(1.0, "Y")]).unwrap();
        assert_eq!(h.partition_commuting(), vec![vec![PauliTerm::parse(1.0, "Y")]]);
    }

    #[test]
    fn dense_examples() {
        let z = ps("Z").to_dense().unwrap();
        assert_eq!(z, DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]));
        let x = ps("X").to_dense().unwrap();
        assert_eq!(x, DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]));
        let h = QubitHamiltonian::with_identity(1, 2.0, [PauliTerm::parse(1.0, "Z")]).unwrap();
        let d = h.to_dense().unwrap();
        assert_eq!(d, DMatrix::from_row_slice(2, 2, &[ONE * 3.0, ZERO, ZERO, ONE]));
        // qubit 0 is the least-significant bit: X on qubit 0 maps |00> to |01> (index 1)
        let xi = ps("IX").to_dense().unwrap();
        assert_eq!(xi[(1, 0)], ONE);
        assert!(matches!(
            PauliString::identity(13).to_dense(),
            Err(Error::TooManyQubits { n_qubits: 13, .. })
        ));
    }

    #[test]
    fn json_round_trip_uses_documented_schema() {
        let h = QubitHamiltonian::with_identity(3, 0.5, [PauliTerm::parse(-1.0, "XYZ")]).unwrap();
        let json = serde_json::to_value(&h).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"n_qubits": 3, "identity_coeff": 0.5, "terms": [{"coeff": -1.0, "string": "XYZ"}]})
        );
        let back: QubitHamiltonian = serde_json::from_value(json).unwrap();
        assert_eq!(back, h);
        let bad = serde_json::json!({"n_qubits": 2, "identity_coeff": 0.0, "terms": [{"coeff": 1.0, "string": "XYZ"}]});
        assert!(serde_json::from_value::<QubitHamiltonian>(bad).is_err());
    }
}
