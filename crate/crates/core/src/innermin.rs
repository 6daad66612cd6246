//! Minimum of `Tr(Z rho_s)` over pure product states.
//!
//! Random probes over the angle rectangles pick the starting points, then
//! BFGS refines the lowest ones. [`grid_oracle`] is an exhaustive grid search
//! kept independent of that path for cross-checking.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{FewError, Result};
use crate::qn::{self, QnSettings};
use crate::qops::CMatrix;
use crate::states::{param_count, product_ket_into, ProductStateParams};
use crate::witness::TracelessObservable;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerMinConfig {
    /// Random probes evaluated before refinement.
    pub n_probe: usize,
    /// Lowest probes handed to quasi-Newton refinement.
    pub n_refine: usize,
    pub max_iters: usize,
    pub grad_step: f64,
    pub conv_tol: f64,
}

impl Default for InnerMinConfig {
    fn default() -> Self {
        InnerMinConfig { n_probe: 400, n_refine: 5, max_iters: 200, grad_step: 1e-5, conv_tol: 1e-8 }
    }
}

impl InnerMinConfig {
    /// Probe/refine budgets by system: (400, 5) for two qubits, (500, 8) for
    /// three qubits, (800, 10) for two qutrits; otherwise 100 probes per angle
    /// and one refinement per angle.
    pub fn for_dims(dims: &[usize]) -> Self {
        let (n_probe, n_refine) = match dims {
            [2, 2] => (400, 5),
            [2, 2, 2] => (500, 8),
            [3, 3] => (800, 10),
            _ => {
                let p = param_count(dims).unwrap_or(4).max(1);
                (100 * p, p)
            }
        };
        InnerMinConfig { n_probe, n_refine, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FewError::InvalidConfig(m.into()));
        if self.n_probe == 0 || self.n_refine == 0 || self.max_iters == 0 {
            return bad("inner counts must be at least 1");
        }
        if self.n_refine > self.n_probe {
            return bad("n_refine must not exceed n_probe");
        }
        if !(self.grad_step > 0.0 && self.grad_step <= 1e-2) {
            return bad("grad_step must lie in (0, 1e-2]");
        }
        if !(self.conv_tol > 0.0) {
            return bad("conv_tol must be positive");
        }
        Ok(())
    }

    pub fn qn_settings(&self) -> QnSettings {
        QnSettings { max_iters: self.max_iters, grad_step: self.grad_step, conv_tol: self.conv_tol }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerMinResult {
    pub mu: f64,
    pub argmin: ProductStateParams,
    pub probes_used: usize,
    /// `(start, final)` objective of every refinement, lowest start first.
    pub refinements: Vec<(f64, f64)>,
}

/// `<psi| M |psi>` for pure product states of a fixed Hermitian `M`.
pub struct ProductExpectation<'a> {
    matrix: &'a [C64],
    dims: &'a [usize],
    n: usize,
    ket: Vec<C64>,
}

impl<'a> ProductExpectation<'a> {
    pub fn new(matrix: &'a CMatrix, dims: &'a [usize]) -> Result<Self> {
        param_count(dims)?;
        let n: usize = dims.iter().product();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(FewError::DimensionMismatch { expected: n, found: matrix.rows() });
        }
        Ok(ProductExpectation { matrix: matrix.as_slice(), dims, n, ket: vec![C64::new(0.0, 0.0); n] })
    }

    pub fn eval(&mut self, angles: &[f64]) -> f64 {
        product_ket_into(self.dims, angles, &mut self.ket);
        let (n, m, psi) = (self.n, self.matrix, &self.ket);
        let mut diag = 0.0;
        let mut off = C64::new(0.0, 0.0);
        for i in 0..n {
            let row = &m[i * n..(i + 1) * n];
            diag += row[i].re * psi[i].norm_sqr();
            let mut acc = C64::new(0.0, 0.0);
            for j in (i + 1)..n {
                acc += row[j] * psi[j];
            }
            off += psi[i].conj() * acc;
        }
        diag + 2.0 * off.re
    }
}

/// Probe-then-refine minimization of `<psi|M|psi>` over product states for
/// any Hermitian `M`.
pub fn min_product_expectation<R: Rng + ?Sized>(
    matrix: &CMatrix,
    dims: &[usize],
    cfg: &InnerMinConfig,
    rng: &mut R,
) -> Result<InnerMinResult> {
    cfg.validate()?;
    let mut eval = ProductExpectation::new(matrix, dims)?;
    let p = param_count(dims)?;

    let mut probes = Vec::with_capacity(cfg.n_probe * p);
    let mut values = Vec::with_capacity(cfg.n_probe);
    for _ in 0..cfg.n_probe {
        let params = ProductStateParams::random(dims, rng)?;
        values.push(eval.eval(params.angles()));
        probes.extend_from_slice(params.angles());
    }

    let mut order: Vec<usize> = (0..cfg.n_probe).collect();
    // stable sort: equal values keep the lower probe index first
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let settings = cfg.qn_settings();
    let mut best_value = values[order[0]];
    let mut best_x = probes[order[0] * p..(order[0] + 1) * p].to_vec();
    let mut refinements = Vec::with_capacity(cfg.n_refine);
    let mut objective = |x: &[f64]| eval.eval(x);
    for &start in order.iter().take(cfg.n_refine) {
        let x0 = &probes[start * p..(start + 1) * p];
        let out = qn::minimize(&mut objective, x0, &settings);
        refinements.push((out.start_value, out.value));
        if out.value < best_value {
            best_value = out.value;
            best_x = out.x;
        }
    }

    let mut argmin = ProductStateParams::new(best_x, dims)?;
    argmin.canonicalize(dims);
    Ok(InnerMinResult { mu: best_value, argmin, probes_used: cfg.n_probe, refinements })
}

/// Minimum of `Tr(Z rho_s)` over pure product states.
pub fn min_sep_expectation<R: Rng + ?Sized>(
    z: &TracelessObservable,
    dims: &[usize],
    cfg: &InnerMinConfig,
    rng: &mut R,
) -> Result<InnerMinResult> {
    min_product_expectation(z.matrix(), dims, cfg, rng)
}

pub const GRID_LIMIT: u128 = 100_000_000;

/// Exhaustive minimum over a regular grid with `resolution` points per angle,
/// endpoints included. Always an upper bound on the true minimum; refining a
/// grid so that the old points stay on it (`r -> 2r - 1`) never raises it.
pub fn grid_oracle(matrix: &CMatrix, dims: &[usize], resolution: usize) -> Result<f64> {
    if resolution < 2 {
        return Err(FewError::InvalidConfig("grid resolution must be at least 2".into()));
    }
    let p = param_count(dims)?;
    let evaluations = (resolution as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if evaluations > GRID_LIMIT {
        return Err(FewError::GridTooLarge { evaluations, limit: GRID_LIMIT });
    }
    let mut eval = ProductExpectation::new(matrix, dims)?;

    // per-angle upper range: phases span [0, 2pi], amplitudes [0, pi/2]
    let mut spans = Vec::with_capacity(p);
    for &d in dims {
        match d {
            2 => spans.extend_from_slice(&[TAU, FRAC_PI_2]),
            _ => spans.extend_from_slice(&[TAU, TAU, FRAC_PI_2, FRAC_PI_2]),
        }
    }
    let step = |k: usize, span: f64| span * k as f64 / (resolution - 1) as f64;
    let mut counter = vec![0usize; p];
    let mut angles = vec![0.0; p];
    let mut best = f64::INFINITY;
    loop {
        for i in 0..p {
            angles[i] = step(counter[i], spans[i]);
        }
        best = best.min(eval.eval(&angles));
        // odometer increment, last angle fastest
        let mut i = p;
        loop {
            if i == 0 {
                return Ok(best);
            }
            i -= 1;
            counter[i] += 1;
            if counter[i] < resolution {
                break;
            }
            counter[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{pauli_z, tensor_product, trace_product_re};
    use crate::seed;
    use crate::states::product_pure_state;

    #[test]
    fn fast_expectation_matches_trace() {
        let mut rng = seed::rng(4);
        for dims in [vec![2, 2], vec![2, 2, 2], vec![3, 3], vec![2, 3]] {
            let n: usize = dims.iter().product();
            // random Hermitian matrix
            let mut m = CMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let z = C64::new(rng.gen::<f64>() - 0.5, if i == j { 0.0 } else { rng.gen::<f64>() - 0.5 });
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            let mut eval = ProductExpectation::new(&m, &dims).unwrap();
            for _ in 0..10 {
                let p = ProductStateParams::random(&dims, &mut rng).unwrap();
                let rho = product_pure_state(&p, &dims).unwrap();
                let direct = trace_product_re(&m, rho.matrix()).unwrap();
                assert!((eval.eval(p.angles()) - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(InnerMinConfig::default().validate().is_ok());
        let bad = InnerMinConfig { n_refine: 500, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = InnerMinConfig { grad_step: 0.1, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = InnerMinConfig { n_probe: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert_eq!(InnerMinConfig::for_dims(&[3, 3]).n_probe, 800);
        assert_eq!(InnerMinConfig::for_dims(&[2, 2, 2]).n_refine, 8);
    }

    #[test]
    fn refinements_never_worsen() {
        let z = tensor_product(&pauli_z(), &pauli_z()).scale(0.5);
        let res = min_product_expectation(&z, &[2, 2], &InnerMinConfig::default(), &mut seed::rng(1)).unwrap();
        assert_eq!(res.refinements.len(), 5);
        for (start, end) in &res.refinements {
            assert!(*end <= start + 1e-12);
        }
        assert!((res.mu + 0.5).abs() < 1e-10);
    }

    #[test]
    fn grid_guard_and_resolution() {
        let z = CMatrix::zeros(9, 9);
        assert!(matches!(grid_oracle(&z, &[3, 3], 41), Err(FewError::GridTooLarge { .. })));
        assert!(grid_oracle(&z, &[2, 2], 1).is_err());
    }
}
