//! The FEW measure `E(rho) = max{0, max_Z [min Tr(Z rho_s) - Tr(Z rho)]}`
//! and helpers that probe its properties numerically.
//!
//! The genetic search only ever overestimates fitness (a missed inner
//! minimum inflates `mu`), so the best candidates are re-checked before a
//! positive value is reported: first with a larger inner budget, then with
//! [`verify_witness_with`]. A violation found there lowers `mu` to the value
//! found. A positive result therefore always comes with a witness that
//! passed verification on the target.

use alloc::vec::Vec;

use crate::error::Result;
use crate::ga::{self, FitnessContext, GaConfig, GaTrace};
use crate::innermin::{min_product_expectation, InnerMinConfig};
use crate::par::{ParallelMap, Sequential};
use crate::qops::CMatrix;
use crate::seed;
use crate::states::{apply_local_unitary, DensityMatrix};
use crate::witness::{
    expectation, extract_witness, verify_witness_with, TracelessObservable, VerificationFailure,
    VerificationReport, Witness, TOL_NEG,
};

const STREAM_BOOST: u64 = 10;
const STREAM_VERIFY: u64 = 11;
const MAX_VERIFY_ROUNDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    EntanglementCertified,
    /// The search found no certified witness. Not a separability proof.
    Undetected,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::EntanglementCertified => "EntanglementCertified",
            Verdict::Undetected => "Undetected",
        }
    }
}

/// Post-search certification settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    /// Refined product-state samples per witness verification.
    pub verify_budget: usize,
    /// Distinct top chromosomes from the final population to re-check.
    pub certify_candidates: usize,
    /// Inner probe/refine budgets are multiplied by this for the re-check.
    pub boost_factor: usize,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions { verify_budget: 100_000, certify_candidates: 4, boost_factor: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct MeasureResult {
    /// `E(rho)`; zero unless the verdict is certified.
    pub e_value: f64,
    /// Fitness of `best_z` with its final (possibly lowered) `mu`.
    pub best_fitness: f64,
    /// Best fitness seen by the genetic search before re-checking.
    pub search_fitness: f64,
    pub best_z: TracelessObservable,
    pub mu: f64,
    pub witness: Witness,
    pub verdict: Verdict,
    pub verification: Option<VerificationReport>,
    pub trace: GaTrace,
    pub ga: GaConfig,
    pub inner: InnerMinConfig,
    pub options: MeasureOptions,
}

impl MeasureResult {
    pub fn seed(&self) -> u64 {
        self.ga.seed
    }
}

pub fn compute_few_measure(rho: &DensityMatrix, ga_cfg: &GaConfig, inner_cfg: &InnerMinConfig) -> Result<MeasureResult> {
    compute_few_measure_with(rho, ga_cfg, inner_cfg, &MeasureOptions::default(), &Sequential)
}

struct Candidate {
    z: TracelessObservable,
    mu: f64,
    target: f64,
}

impl Candidate {
    fn fitness(&self) -> f64 {
        self.mu - self.target
    }
}

pub fn compute_few_measure_with(
    rho: &DensityMatrix,
    ga_cfg: &GaConfig,
    inner_cfg: &InnerMinConfig,
    options: &MeasureOptions,
    map: &dyn ParallelMap,
) -> Result<MeasureResult> {
    let outcome = ga::run_ga_with(rho, ga_cfg, inner_cfg, map)?;
    let ctx = FitnessContext::new(rho, ga_cfg.tau_bound, inner_cfg)?;
    let dims = rho.dims();

    // replay the best individual's first evaluation to recover its mu
    let (g, i) = outcome.best_origin;
    let mut replay = seed::rng(ga::fitness_seed(ga_cfg.seed, g, i));
    let best_eval = ctx.evaluate(&outcome.best, &mut replay)?;

    let mut ranked = outcome.ranked_distinct();
    if !ranked.iter().any(|(c, _)| *c == outcome.best) {
        ranked.insert(0, (outcome.best.clone(), outcome.best_fitness));
    }
    let boosted = InnerMinConfig {
        n_probe: inner_cfg.n_probe * options.boost_factor.max(1),
        n_refine: inner_cfg.n_refine * options.boost_factor.max(1),
        ..*inner_cfg
    };

    // stage 1: larger inner budget for every positive candidate
    let mut candidates = Vec::new();
    for (k, (c, f)) in ranked.iter().take(options.certify_candidates).enumerate() {
        if !(*f > 0.0) {
            break;
        }
        let Some(z) = ctx.observable(c)? else { continue };
        let mu_search = if *c == outcome.best { best_eval.mu } else { f + expectation(&z, rho)? };
        let mut rng = seed::derived_rng(ga_cfg.seed, &[STREAM_BOOST, k as u64]);
        let again = min_product_expectation(z.matrix(), dims, &boosted, &mut rng)?;
        let target = expectation(&z, rho)?;
        candidates.push(Candidate { mu: mu_search.min(again.mu), target, z });
    }
    candidates.sort_by(|a, b| b.fitness().total_cmp(&a.fitness()));

    // stage 2: witness verification, lowering mu on each violation found
    let qn = inner_cfg.qn_settings();
    let mut certified: Option<(Candidate, VerificationReport)> = None;
    let mut fallback: Option<Candidate> = None;
    for (k, mut cand) in candidates.into_iter().enumerate() {
        if let Some((best, _)) = &certified {
            if cand.fitness() <= best.fitness() {
                break;
            }
        }
        let mut report = None;
        for round in 0..MAX_VERIFY_ROUNDS {
            if cand.fitness() <= TOL_NEG {
                break;
            }
            let w = extract_witness(&cand.z, cand.mu);
            let vseed = seed::derive(ga_cfg.seed, &[STREAM_VERIFY, k as u64, round as u64]);
            let rep = verify_witness_with(&w, rho, options.verify_budget, vseed, &qn, map)?;
            match rep.failure {
                None => {
                    report = Some(rep);
                    break;
                }
                Some(VerificationFailure::SeparableViolation) => cand.mu += rep.separable_min,
                Some(VerificationFailure::NonnegativeOnTarget) => break,
            }
        }
        match report {
            Some(rep) => {
                if certified.as_ref().is_none_or(|(best, _)| cand.fitness() > best.fitness()) {
                    certified = Some((cand, rep));
                }
            }
            None => {
                if fallback.as_ref().is_none_or(|f| cand.fitness() > f.fitness()) {
                    fallback = Some(cand);
                }
            }
        }
    }

    let (cand, verdict, verification) = match certified {
        Some((cand, rep)) => (cand, Verdict::EntanglementCertified, Some(rep)),
        None => {
            let cand = fallback.unwrap_or_else(|| match best_eval.z.clone() {
                Some(z) => Candidate { z, mu: best_eval.mu, target: best_eval.target },
                None => Candidate {
                    z: TracelessObservable::from_matrix(CMatrix::zeros(rho.dim(), rho.dim()), dims)
                        .expect("zero matrix is traceless"),
                    mu: 0.0,
                    target: 0.0,
                },
            });
            (cand, Verdict::Undetected, None)
        }
    };
    let best_fitness = cand.fitness();
    let e_value = if verdict == Verdict::EntanglementCertified { best_fitness } else { 0.0 };
    let witness = extract_witness(&cand.z, cand.mu);
    Ok(MeasureResult {
        e_value,
        best_fitness,
        search_fitness: outcome.best_fitness,
        best_z: cand.z,
        mu: cand.mu,
        witness,
        verdict,
        verification,
        trace: outcome.trace,
        ga: *ga_cfg,
        inner: *inner_cfg,
        options: *options,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuCheck {
    pub e_original: f64,
    pub e_rotated: f64,
    pub delta: f64,
}

/// Measures `rho` with `ga_cfg.seed` and its local-unitary image with
/// `rotated_seed`.
pub fn check_lu_invariance(
    rho: &DensityMatrix,
    unitaries: &[CMatrix],
    ga_cfg: &GaConfig,
    inner_cfg: &InnerMinConfig,
    options: &MeasureOptions,
    rotated_seed: u64,
    map: &dyn ParallelMap,
) -> Result<LuCheck> {
    let rotated = apply_local_unitary(rho, unitaries)?;
    let e_original = compute_few_measure_with(rho, ga_cfg, inner_cfg, options, map)?.e_value;
    let cfg_rot = GaConfig { seed: rotated_seed, ..*ga_cfg };
    let e_rotated = compute_few_measure_with(&rotated, &cfg_rot, inner_cfg, options, map)?.e_value;
    Ok(LuCheck { e_original, e_rotated, delta: (e_original - e_rotated).abs() })
}

pub const CONVEXITY_SLACK: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityCheck {
    /// `E(lambda rho + (1 - lambda) sigma)`
    pub lhs: f64,
    /// `lambda E(rho) + (1 - lambda) E(sigma)`
    pub rhs: f64,
    pub slack_ok: bool,
}

/// Compares the measure of a mixture against the mixture of measures. Terms
/// with zero weight are not computed.
pub fn check_convexity(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    lambda: f64,
    ga_cfg: &GaConfig,
    inner_cfg: &InnerMinConfig,
    options: &MeasureOptions,
    map: &dyn ParallelMap,
) -> Result<ConvexityCheck> {
    let mixture = rho.mix(lambda, sigma)?;
    let measure = |state: &DensityMatrix, stream: u64| -> Result<f64> {
        let cfg = GaConfig { seed: seed::derive(ga_cfg.seed, &[stream]), ..*ga_cfg };
        Ok(compute_few_measure_with(state, &cfg, inner_cfg, options, map)?.e_value)
    };
    let lhs = measure(&mixture, 0)?;
    let e_rho = if lambda > 0.0 { measure(rho, 1)? } else { 0.0 };
    let e_sigma = if lambda < 1.0 { measure(sigma, 2)? } else { 0.0 };
    let rhs = lambda * e_rho + (1.0 - lambda) * e_sigma;
    Ok(ConvexityCheck { lhs, rhs, slack_ok: lhs <= rhs + CONVEXITY_SLACK })
}
