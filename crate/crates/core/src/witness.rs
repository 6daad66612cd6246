//! Traceless observables `Z` on the unit Hilbert-Schmidt sphere, the shifted
//! witness `W = Z - mu I`, and a sampling check of the witness conditions.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{FewError, Result};
use crate::innermin::ProductExpectation;
use crate::par::{ParallelMap, Sequential};
use crate::qn::{self, QnSettings};
use crate::qops::{hs_norm, trace_product, CMatrix, ProductBasis};
use crate::seed;
use crate::states::{DensityMatrix, ProductStateParams};

/// Largest allowed imaginary residue of `Tr(O rho)` for Hermitian `O`.
const IMAG_RESIDUE_TOL: f64 = 1e-10;
/// Witness must be below this on the target state.
pub const TOL_NEG: f64 = 1e-6;
/// Witness may dip at most this far below zero on separable states.
pub const TOL_SEP: f64 = 1e-6;
/// Norms below this count as the zero operator.
pub const ZERO_NORM: f64 = 1e-12;
/// Trace/Hermiticity tolerance for observables loaded from outside.
pub const EXTERNAL_TOL: f64 = 1e-10;

/// Real coefficients over a product generator basis, flattened row-major with
/// the first subsystem slowest. Entry 0 (all identities) is pinned to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    shape: Vec<usize>,
    values: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl CoefficientTensor {
    pub fn new(shape: Vec<usize>, values: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        let len: usize = shape.iter().product();
        if values.len() != len {
            return Err(FewError::DimensionMismatch { expected: len, found: values.len() });
        }
        if values[0] != 0.0 {
            return Err(FewError::NonzeroIdentityCoefficient(values[0]));
        }
        if let Some(&v) = values.iter().find(|v| !(lo..=hi).contains(*v)) {
            return Err(FewError::OutOfRange { name: "tau", value: v, lo, hi });
        }
        Ok(CoefficientTensor { shape, values, lo, hi })
    }

    /// Tensor with no bound other than finiteness.
    pub fn unbounded(shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        Self::new(shape, values, f64::MIN, f64::MAX)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    fn scaled(&self, s: f64) -> Self {
        let (a, b) = (self.lo * s, self.hi * s);
        CoefficientTensor {
            shape: self.shape.clone(),
            values: self.values.iter().map(|v| v * s).collect(),
            lo: a.min(b),
            hi: a.max(b),
        }
    }
}

/// A candidate `Z`: coefficients plus the materialized matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TracelessObservable {
    tau: CoefficientTensor,
    matrix: CMatrix,
    dims: Vec<usize>,
    normalized: bool,
}

impl TracelessObservable {
    pub fn from_tensor(tau: CoefficientTensor, basis: &ProductBasis) -> Result<Self> {
        if tau.shape() != basis.shape().as_slice() {
            return Err(FewError::DimensionMismatch { expected: basis.len(), found: tau.values.len() });
        }
        let matrix = basis.assemble(&tau.values)?;
        Ok(TracelessObservable { tau, matrix, dims: basis.dims().to_vec(), normalized: false })
    }

    /// Accepts an explicit matrix if it is Hermitian and traceless within
    /// `1e-10`. The coefficients are recovered by projection.
    pub fn from_matrix(matrix: CMatrix, dims: &[usize]) -> Result<Self> {
        let basis = ProductBasis::new(dims)?;
        if matrix.rows() != basis.total_dim() || !matrix.is_square() {
            return Err(FewError::DimensionMismatch { expected: basis.total_dim(), found: matrix.rows() });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > EXTERNAL_TOL {
            return Err(FewError::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if trace.abs() > EXTERNAL_TOL {
            return Err(FewError::NotTraceless { trace });
        }
        let mut values = basis.project(&matrix)?;
        values[0] = 0.0;
        let tau = CoefficientTensor::unbounded(basis.shape(), values)?;
        Ok(TracelessObservable { tau, matrix, dims: dims.to_vec(), normalized: false })
    }

    pub fn tau(&self) -> &CoefficientTensor {
        &self.tau
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        hs_norm(&self.matrix)
    }

    /// Rescales onto the unit Hilbert-Schmidt sphere.
    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if norm < ZERO_NORM {
            return Err(FewError::ZeroOperator);
        }
        let s = 1.0 / norm;
        Ok(TracelessObservable {
            tau: self.tau.scaled(s),
            matrix: self.matrix.scale(s),
            dims: self.dims.clone(),
            normalized: true,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        TracelessObservable {
            tau: self.tau.scaled(c),
            matrix: self.matrix.scale(c),
            dims: self.dims.clone(),
            normalized: self.normalized && (c.abs() - 1.0).abs() < 1e-15,
        }
    }
}

/// `W = Z - mu I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    matrix: CMatrix,
    mu: f64,
    source: TracelessObservable,
}

impl Witness {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn source(&self) -> &TracelessObservable {
        &self.source
    }

    pub fn dims(&self) -> &[usize] {
        self.source.dims()
    }

    /// Rebuilds a witness from its matrix alone: `Z` is the traceless part and
    /// `mu = -Tr(W)/D`.
    pub fn from_matrix(matrix: CMatrix, dims: &[usize]) -> Result<Self> {
        if !matrix.is_square() {
            return Err(FewError::NotSquare { rows: matrix.rows(), cols: matrix.cols() });
        }
        let n = matrix.rows() as f64;
        let mu = -matrix.trace().re / n;
        let mut z = matrix.clone();
        for i in 0..matrix.rows() {
            z[(i, i)] += num_complex::Complex64::new(mu, 0.0);
        }
        let source = TracelessObservable::from_matrix(z, dims)?;
        Ok(extract_witness(&source, mu))
    }
}

/// Anything with a Hermitian matrix that can be measured against a state.
pub trait Observable {
    fn observable_matrix(&self) -> &CMatrix;
}

impl Observable for TracelessObservable {
    fn observable_matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

impl Observable for Witness {
    fn observable_matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

impl Observable for CMatrix {
    fn observable_matrix(&self) -> &CMatrix {
        self
    }
}

pub fn normalize(z: &TracelessObservable) -> Result<TracelessObservable> {
    z.normalize()
}

/// `Re Tr(O rho)`.
pub fn expectation<O: Observable + ?Sized>(op: &O, rho: &DensityMatrix) -> Result<f64> {
    let t = trace_product(op.observable_matrix(), rho.matrix())?;
    debug_assert!(t.im.abs() <= IMAG_RESIDUE_TOL, "imaginary residue {}", t.im);
    Ok(t.re)
}

pub fn extract_witness(z: &TracelessObservable, mu: f64) -> Witness {
    let n = z.matrix.rows();
    let mut matrix = z.matrix.clone();
    for i in 0..n {
        matrix[(i, i)] -= num_complex::Complex64::new(mu, 0.0);
    }
    Witness { matrix, mu, source: z.clone() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationFailure {
    /// `Tr(W rho) >= -TOL_NEG`: the witness does not flag the target.
    NonnegativeOnTarget,
    /// Some sampled product state gave `Tr(W rho_s) < -TOL_SEP`.
    SeparableViolation,
}

impl fmt::Display for VerificationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerificationFailure::NonnegativeOnTarget => write!(f, "nonnegative on target"),
            VerificationFailure::SeparableViolation => write!(f, "negative on a separable state"),
        }
    }
}

/// Outcome of [`verify_witness`]. A pass certifies only that no violation
/// was found within the sampling budget.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// `Tr(W rho)`.
    pub target_value: f64,
    /// Lowest `Tr(W rho_s)` over the refined product-state samples.
    pub separable_min: f64,
    pub budget: usize,
    pub seed: u64,
    pub pass: bool,
    pub failure: Option<VerificationFailure>,
}

impl VerificationReport {
    pub fn claim(&self) -> &'static str {
        if self.pass {
            "no violation found within budget"
        } else {
            "witness conditions violated"
        }
    }
}

/// Samples `budget` product states, refines each with quasi-Newton descent
/// on `Tr(W rho_s)`, and checks both witness conditions. Sample `i` always
/// uses the stream derived from `(seed, i)`, so a larger budget only adds
/// samples.
pub fn verify_witness(w: &Witness, rho: &DensityMatrix, budget: usize, seed: u64) -> Result<VerificationReport> {
    verify_witness_with(w, rho, budget, seed, &QnSettings::default(), &Sequential)
}

pub fn verify_witness_with(
    w: &Witness,
    rho: &DensityMatrix,
    budget: usize,
    seed: u64,
    qn_settings: &QnSettings,
    map: &dyn ParallelMap,
) -> Result<VerificationReport> {
    if budget == 0 {
        return Err(FewError::InvalidConfig("verification budget must be at least 1".into()));
    }
    let target_value = expectation(w, rho)?;
    let dims = rho.dims();
    // validates dims and sizes before fanning out
    ProductExpectation::new(&w.matrix, dims)?;
    let values = map.map_indexed(budget, &|i| {
        let mut eval = ProductExpectation::new(&w.matrix, dims).expect("validated");
        let mut rng = seed::derived_rng(seed, &[i as u64]);
        let start = ProductStateParams::random(dims, &mut rng).expect("validated");
        let mut f = |x: &[f64]| eval.eval(x);
        qn::minimize(&mut f, start.angles(), qn_settings).value
    });
    let separable_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let failure = if target_value >= -TOL_NEG {
        Some(VerificationFailure::NonnegativeOnTarget)
    } else if separable_min < -TOL_SEP {
        Some(VerificationFailure::SeparableViolation)
    } else {
        None
    };
    Ok(VerificationReport { target_value, separable_min, budget, seed, pass: failure.is_none(), failure })
}
