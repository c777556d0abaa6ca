mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pite::estimator::{combine, sample_hamiltonian, sample_term, ShotSource};
use pite::pauli::PauliTerm;
use pite::simulate::{run_trajectory, RngSpec};
use pite::statevector::{expectation, StateVector};
use pite::synth::{trotter_pite_circuit, TrotterSchedule};
use pite::Error;

#[test]
fn estimate_is_unbiased_on_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..20 {
        let h = random_hamiltonian(&mut rng, 3, 8);
        let psi = random_state(&mut rng, 3);
        let samples = sample_hamiltonian(&ShotSource::State(&psi), &h, 10_000, &RngSpec::new(k)).unwrap();
        let est = combine(&samples, h.identity_coeff()).unwrap();
        let exact = expectation(&psi, &h).unwrap();
        assert!((est.mean - exact).abs() <= 5.0 * est.stderr.max(1e-12), "draw {k}: {} vs {exact}", est.mean);
    }
}

#[test]
fn circuit_source_estimates_post_selected_energy() {
    let spec = tim(4);
    let h = spec.hamiltonian().unwrap();
    let c = trotter_pite_circuit(&h, &TrotterSchedule::new(&h, 5, 0.1).unwrap(), &spec.initial_circuit(0.0).unwrap()).unwrap();
    let zero = StateVector::zero(4).unwrap();
    let exact = expectation(&run_trajectory(&c, &zero).unwrap().final_state, &h).unwrap();
    for quit_if_fail in [true, false] {
        let source = ShotSource::Circuit {
            circuit: &c,
            input: &zero,
            quit_if_fail,
        };
        let samples = sample_hamiltonian(&source, &h, 20_000, &RngSpec::new(1)).unwrap();
        assert!(samples.iter().all(|s| s.n_shots == 20_000 && s.n_success < s.n_shots));
        let est = combine(&samples, h.identity_coeff()).unwrap();
        assert!((est.mean - exact).abs() <= 5.0 * est.stderr);
    }
}

#[test]
fn stderr_shrinks_as_inverse_root_shots() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let h = random_hamiltonian(&mut rng, 3, 8);
    let psi = random_state(&mut rng, 3);
    let source = ShotSource::State(&psi);
    let se = |n: usize| {
        combine(&sample_hamiltonian(&source, &h, n, &RngSpec::new(n as u64)).unwrap(), h.identity_coeff())
            .unwrap()
            .stderr
    };
    let ratio = se(1_000) / se(16_000);
    assert!((ratio / 4.0 - 1.0).abs() <= 0.25, "ratio {ratio}");
}

#[test]
fn eigenstate_terms_have_no_variance() {
    let psi = StateVector::basis(2, 0b01).unwrap();
    let t = sample_term(&ShotSource::State(&psi), &PauliTerm::parse(0.5, "ZZ"), 100, &RngSpec::new(0)).unwrap();
    assert_eq!((t.mean, t.variance, t.n_success), (-1.0, 0.0, 100));
    let est = combine(&[t], 0.25).unwrap();
    assert_eq!((est.mean, est.stderr), (-0.25, 0.0));
}

#[test]
fn identity_terms_and_empty_statistics_are_errors() {
    let psi = StateVector::zero(1).unwrap();
    let id = PauliTerm::new(1.0, "I".parse().unwrap()).unwrap();
    assert!(matches!(
        sample_term(&ShotSource::State(&psi), &id, 10, &RngSpec::new(0)),
        Err(Error::IdentityString)
    ));
    let mut t = sample_term(&ShotSource::State(&psi), &PauliTerm::parse(1.0, "Z"), 10, &RngSpec::new(0)).unwrap();
    t.n_success = 0;
    assert!(matches!(combine(&[t], 0.0), Err(Error::NoStatistics)));
}
