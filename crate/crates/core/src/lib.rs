//! Trotterised probabilistic imaginary time evolution (PITE).
//!
//! Hamiltonians are sums of weighted Pauli strings ([`pauli`]); each term is
//! lowered to a non-unitary Pauli gadget that writes its parity onto a shared
//! ancilla, rotates it, and post-selects the ancilla on `|0⟩` ([`synth`]).
//! [`simulate`] runs those circuits exactly or shot by shot, [`oracle`]
//! provides dense reference results, and [`experiment`] ties everything to a
//! config file.

pub mod circuit;
pub mod config;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod models;
pub mod oracle;
pub mod pauli;
pub mod simulate;
pub mod statevector;
pub mod synth;

pub use error::{Error, Result};
