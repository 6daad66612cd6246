use few_core::measure::{check_convexity, check_lu_invariance, compute_few_measure_with};
use few_core::qops::{pauli_x, pauli_z, CMatrix};
use few_core::seed;
use few_core::states::{bell_state, random_separable, werner, DensityMatrix};
use few_core::witness::verify_witness;
use few_core::{GaConfig, InnerMinConfig, MeasureOptions, Sequential, Verdict};

fn quick(seed: u64) -> (GaConfig, InnerMinConfig, MeasureOptions) {
    let ga = GaConfig { pop_size: 80, generations: 25, seed, ..GaConfig::default() };
    let inner = InnerMinConfig { n_probe: 200, n_refine: 3, ..InnerMinConfig::default() };
    let opts = MeasureOptions { verify_budget: 2000, ..MeasureOptions::default() };
    (ga, inner, opts)
}

fn medium(seed: u64) -> (GaConfig, InnerMinConfig, MeasureOptions) {
    let (_, inner, opts) = quick(seed);
    (GaConfig { pop_size: 250, generations: 80, seed, ..GaConfig::default() }, inner, opts)
}

#[test]
fn bell_state_is_certified_below_the_bound() {
    let (ga, inner, opts) = quick(1);
    let rho = bell_state(false, false);
    let r = compute_few_measure_with(&rho, &ga, &inner, &opts, &Sequential).unwrap();
    assert_eq!(r.verdict, Verdict::EntanglementCertified);
    assert!(r.e_value > 0.4 && r.e_value < 1.0 / 3f64.sqrt() + 5e-3, "{}", r.e_value);
    assert_eq!(r.e_value, r.best_fitness);
    assert!(r.best_z.is_normalized());
    assert!((r.witness.mu() - r.mu).abs() < 1e-15);
    let rep = r.verification.as_ref().unwrap();
    assert!(rep.pass);
    // independent re-check with a fresh stream
    assert!(verify_witness(&r.witness, &rho, 1000, 12345).unwrap().pass);
}

#[test]
fn separable_inputs_report_zero() {
    let (ga, inner, opts) = quick(2);
    let mut rng = seed::rng(99);
    for _ in 0..2 {
        let rho = random_separable(&[2, 2], 16, &mut rng).unwrap();
        let r = compute_few_measure_with(&rho, &ga, &inner, &opts, &Sequential).unwrap();
        assert_eq!(r.e_value, 0.0);
        assert_eq!(r.verdict, Verdict::Undetected);
    }
    let mixed = DensityMatrix::maximally_mixed(&[2, 2]).unwrap();
    let r = compute_few_measure_with(&mixed, &ga, &inner, &opts, &Sequential).unwrap();
    assert_eq!(r.e_value, 0.0);
    assert!(r.verification.is_none());
}

#[test]
fn werner_value_tracks_closed_form() {
    let (ga, inner, opts) = medium(3);
    let r = compute_few_measure_with(&werner(0.9).unwrap(), &ga, &inner, &opts, &Sequential).unwrap();
    let expected = 2.0 * (0.9 - 0.5) / 3f64.sqrt();
    assert!((r.e_value - expected).abs() < 0.06, "{} vs {expected}", r.e_value);
    assert!(r.e_value <= expected + 5e-3);
}

#[test]
fn identical_seeds_replay_exactly() {
    let (ga, inner, opts) = quick(4);
    let rho = werner(0.8).unwrap();
    let a = compute_few_measure_with(&rho, &ga, &inner, &opts, &Sequential).unwrap();
    let b = compute_few_measure_with(&rho, &ga, &inner, &opts, &Sequential).unwrap();
    assert_eq!(a.e_value, b.e_value);
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.seed(), 4);
}

#[test]
fn identity_rotation_same_seed_has_zero_delta() {
    let (ga, inner, opts) = quick(5);
    let id = [CMatrix::identity(2), CMatrix::identity(2)];
    let lu = check_lu_invariance(&bell_state(false, false), &id, &ga, &inner, &opts, ga.seed, &Sequential).unwrap();
    assert_eq!(lu.delta, 0.0);

    let rot = [pauli_z(), pauli_x()];
    let lu = check_lu_invariance(&bell_state(false, false), &rot, &ga, &inner, &opts, 77, &Sequential).unwrap();
    assert!(lu.delta <= 0.05, "{lu:?}");
}

#[test]
fn convexity_edge_weight() {
    let (ga, inner, opts) = medium(6);
    let rho = bell_state(false, false);
    let sigma = werner(0.75).unwrap();
    let c = check_convexity(&rho, &sigma, 0.0, &ga, &inner, &opts, &Sequential).unwrap();
    assert!(c.slack_ok);
    assert!((c.lhs - c.rhs).abs() < 0.05);
}

#[test]
fn more_generations_do_not_lose_ground() {
    let (ga, inner, opts) = quick(7);
    let rho = werner(0.85).unwrap();
    let small = compute_few_measure_with(&rho, &ga, &inner, &opts, &Sequential).unwrap();
    let big_cfg = GaConfig { generations: 2 * ga.generations, ..ga };
    let big = compute_few_measure_with(&rho, &big_cfg, &inner, &opts, &Sequential).unwrap();
    assert!(big.search_fitness >= small.search_fitness);
    assert!(big.e_value >= small.e_value - 0.01);
}
