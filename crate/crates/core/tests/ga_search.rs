use few_core::ga::{chromosome_len, encode, fitness, fitness_seed, run_ga, run_ga_with, FitnessContext};
use few_core::qops::{CMatrix, ProductBasis};
use few_core::seed;
use few_core::states::{bell_ket, bell_state, DensityMatrix};
use few_core::{Chromosome, GaConfig, InnerMinConfig, ParallelMap};

/// Runs jobs back to front to check that evaluation order does not matter.
struct Reversed;

impl ParallelMap for Reversed {
    fn map_indexed(&self, n: usize, f: &(dyn Fn(usize) -> f64 + Sync)) -> Vec<f64> {
        let mut out: Vec<f64> = (0..n).rev().map(f).collect();
        out.reverse();
        out
    }
}

fn small_ga(seed: u64) -> GaConfig {
    GaConfig { pop_size: 24, generations: 6, seed, ..GaConfig::default() }
}

fn small_inner() -> InnerMinConfig {
    InnerMinConfig { n_probe: 60, n_refine: 2, ..InnerMinConfig::default() }
}

/// Chromosome for `I/4 - |psi00><psi00|` in Pauli coordinates, scaled into range.
fn bell_gap_chromosome() -> Chromosome {
    let basis = ProductBasis::new(&[2, 2]).unwrap();
    let m = CMatrix::identity(4).scale(0.25).sub(&CMatrix::outer(&bell_ket(false, false))).unwrap();
    let mut tau = basis.project(&m).unwrap();
    tau[0] = 0.0;
    encode(&tau, 1.0)
}

#[test]
fn bell_gap_chromosome_scores_inverse_sqrt3() {
    let rho = bell_state(false, false);
    let c = bell_gap_chromosome();
    let f = fitness(&c, &rho, &GaConfig::default(), &InnerMinConfig::default(), &mut seed::rng(1)).unwrap();
    assert!((f - 1.0 / 3f64.sqrt()).abs() < 1e-3, "{f}");
}

#[test]
fn maximally_mixed_has_no_positive_fitness() {
    let rho = DensityMatrix::maximally_mixed(&[2, 2]).unwrap();
    let mut rng = seed::rng(8);
    for _ in 0..10 {
        let c = Chromosome::random(chromosome_len(&[2, 2]), &mut rng);
        let f = fitness(&c, &rho, &GaConfig::default(), &small_inner(), &mut seed::rng(0)).unwrap();
        assert!(f <= 1e-9, "{f}");
    }
    let out = run_ga(&rho, &small_ga(3), &small_inner()).unwrap();
    assert!(out.best_fitness <= 1e-9);
}

#[test]
fn fitness_is_deterministic_and_scale_free() {
    let rho = bell_state(false, true);
    let c = Chromosome::random(chromosome_len(&[2, 2]), &mut seed::rng(77));
    let inner = small_inner();
    let a = fitness(&c, &rho, &GaConfig::default(), &inner, &mut seed::rng(5)).unwrap();
    let b = fitness(&c, &rho, &GaConfig::default(), &inner, &mut seed::rng(5)).unwrap();
    assert_eq!(a, b);
    // decoded coefficients scale with the bound, normalization undoes it
    let wide = GaConfig { tau_bound: 3.5, ..GaConfig::default() };
    let c2 = fitness(&c, &rho, &wide, &inner, &mut seed::rng(5)).unwrap();
    assert!((a - c2).abs() < 1e-12);
}

#[test]
fn same_seed_same_trace_any_schedule() {
    let rho = bell_state(false, false);
    let a = run_ga(&rho, &small_ga(42), &small_inner()).unwrap();
    let b = run_ga_with(&rho, &small_ga(42), &small_inner(), &Reversed).unwrap();
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.best, b.best);
    let c = run_ga(&rho, &small_ga(43), &small_inner()).unwrap();
    assert_ne!(a.trace, c.trace);
}

#[test]
fn elitism_keeps_best_non_decreasing() {
    let rho = bell_state(true, false);
    let out = run_ga(&rho, &GaConfig { generations: 12, ..small_ga(9) }, &small_inner()).unwrap();
    assert_eq!(out.trace.records.len(), 12);
    for pair in out.trace.records.windows(2) {
        assert!(pair[1].best_fitness >= pair[0].best_fitness);
    }
    assert!(out.best_fitness > 0.0);
}

#[test]
fn cached_fitness_matches_fresh_evaluation() {
    // the best individual's value is reproducible from its stream coordinates
    let rho = bell_state(false, false);
    let cfg = small_ga(21);
    let inner = small_inner();
    let out = run_ga(&rho, &cfg, &inner).unwrap();
    let ctx = FitnessContext::new(&rho, cfg.tau_bound, &inner).unwrap();
    let (g, i) = out.best_origin;
    let eval = ctx.evaluate(&out.best, &mut seed::rng(fitness_seed(cfg.seed, g, i))).unwrap();
    assert_eq!(eval.fitness, out.best_fitness);
    for (c, f) in &out.final_population {
        assert!(*f <= out.best_fitness);
        assert_eq!(c.len(), chromosome_len(&[2, 2]));
    }
}

#[test]
fn trace_csv_has_one_line_per_generation() {
    let rho = bell_state(false, false);
    let out = run_ga(&rho, &small_ga(1), &small_inner()).unwrap();
    let csv = out.trace.to_csv();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.starts_with("generation,best_fitness,mean_fitness"));
}
