use few_core::qops::{hs_norm, CMatrix, ProductBasis};
use few_core::states::{bell_state, werner, DensityMatrix};
use few_core::witness::{expectation, extract_witness, verify_witness, VerificationFailure};
use few_core::{CoefficientTensor, TracelessObservable, Witness};
use proptest::prelude::*;

fn tau_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len - 1).prop_map(|mut v| {
        v.insert(0, 0.0);
        v
    })
}

fn observable(dims: &[usize], tau: Vec<f64>) -> TracelessObservable {
    let basis = ProductBasis::new(dims).unwrap();
    let t = CoefficientTensor::unbounded(basis.shape(), tau).unwrap();
    TracelessObservable::from_tensor(t, &basis).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_qubit_observables_are_traceless_hermitian(tau in tau_strategy(16)) {
        let z = observable(&[2, 2], tau.clone());
        prop_assert!(z.matrix().trace().norm() < 1e-12);
        prop_assert!(z.matrix().hermitian_deviation() < 1e-15);
        // Pauli products have Tr(P^2) = 4
        let sum_sq: f64 = tau.iter().map(|t| t * t).sum();
        prop_assert!((hs_norm(z.matrix()).powi(2) - 4.0 * sum_sq).abs() < 1e-10);
    }

    #[test]
    fn three_qubit_norm_scales_with_dimension(tau in tau_strategy(64)) {
        let z = observable(&[2, 2, 2], tau.clone());
        let sum_sq: f64 = tau.iter().map(|t| t * t).sum();
        prop_assert!((hs_norm(z.matrix()).powi(2) - 8.0 * sum_sq).abs() < 1e-9);
    }

    #[test]
    fn projection_inverts_assembly(tau in tau_strategy(81)) {
        let z = observable(&[3, 3], tau.clone());
        let back = TracelessObservable::from_matrix(z.matrix().clone(), &[3, 3]).unwrap();
        for (a, b) in tau.iter().zip(back.tau().values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn witness_shift_and_rebuild(tau in tau_strategy(16), mu in -2.0f64..2.0) {
        let z = observable(&[2, 2], tau).normalize().unwrap();
        let w = extract_witness(&z, mu);
        prop_assert!((w.matrix().trace().re + 4.0 * mu).abs() < 1e-12);
        let rebuilt = Witness::from_matrix(w.matrix().clone(), &[2, 2]).unwrap();
        prop_assert!((rebuilt.mu() - mu).abs() < 1e-12);
        prop_assert!(rebuilt.source().matrix().max_abs_diff(z.matrix()) < 1e-12);
    }

    #[test]
    fn normalization_lands_on_unit_sphere(tau in tau_strategy(16), s in 0.01f64..100.0) {
        let z = observable(&[2, 2], tau).scaled(s);
        prop_assume!(z.norm() > 1e-9);
        let n = z.normalize().unwrap();
        prop_assert!((n.norm() - 1.0).abs() < 1e-12);
        prop_assert!(n.is_normalized());
    }
}

fn reduction_witness() -> Witness {
    // I - 2|psi00><psi00|
    let w = CMatrix::identity(4).sub(&CMatrix::outer(&few_core::states::bell_ket(false, false)).scale(2.0)).unwrap();
    Witness::from_matrix(w, &[2, 2]).unwrap()
}

#[test]
fn reduction_witness_has_expected_shift() {
    let w = reduction_witness();
    assert!((w.mu() + 0.5).abs() < 1e-15);
    assert!((expectation(&w, &bell_state(false, false)).unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn reduction_witness_against_werner_states() {
    let w = reduction_witness();
    for f in [0.0, 0.3, 0.5, 0.8, 1.0] {
        let rho = werner(f).unwrap();
        assert!((expectation(&w, &rho).unwrap() - (1.0 - 2.0 * f)).abs() < 1e-12);
    }
    let pass = verify_witness(&w, &werner(0.9).unwrap(), 500, 1).unwrap();
    assert!(pass.pass);
    assert!(pass.separable_min > -1e-9);
    let fail = verify_witness(&w, &werner(0.4).unwrap(), 500, 1).unwrap();
    assert_eq!(fail.failure, Some(VerificationFailure::NonnegativeOnTarget));
}

#[test]
fn underestimated_shift_is_caught() {
    // mu above the true separable minimum makes W negative on a product state
    let w = reduction_witness();
    let bad = extract_witness(w.source(), w.mu() + 0.1);
    let rep = verify_witness(&bad, &bell_state(false, false), 200, 2).unwrap();
    assert_eq!(rep.failure, Some(VerificationFailure::SeparableViolation));
    assert!((rep.separable_min + 0.1).abs() < 1e-6);
}

#[test]
fn verification_is_prefix_monotone() {
    let w = reduction_witness();
    let rho = bell_state(false, false);
    let a = verify_witness(&w, &rho, 50, 9).unwrap();
    let b = verify_witness(&w, &rho, 200, 9).unwrap();
    assert!(b.separable_min <= a.separable_min);
    assert!(verify_witness(&w, &rho, 0, 9).is_err());
}

#[test]
fn maximally_mixed_is_never_flagged() {
    let rho = DensityMatrix::maximally_mixed(&[2, 2]).unwrap();
    let rep = verify_witness(&reduction_witness(), &rho, 100, 1).unwrap();
    assert!(!rep.pass);
}
