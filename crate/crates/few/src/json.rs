//! JSON file formats: density matrices, witnesses and measure results.
//!
//! Matrices are stored as `dims` plus flat row-major `re` and `im` arrays.

use std::path::Path;

use few_core::ga::GaTrace;
use few_core::qops::CMatrix;
use few_core::witness::{VerificationReport, Witness};
use few_core::{DensityMatrix, GaConfig, InnerMinConfig, MeasureOptions, MeasureResult};
use serde::{Deserialize, Serialize};

use crate::error::{read, write, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix, dims: &[usize]) -> Self {
        MatrixFile { dims: dims.to_vec(), re: m.real_parts(), im: m.imag_parts() }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = checked_dim(&self.dims)?;
        Ok(CMatrix::from_parts(n, n, &self.re, &self.im)?)
    }

    /// Applies the density-matrix checks.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        Ok(DensityMatrix::new(self.to_matrix()?, &self.dims)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        parse(path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write(path, &to_pretty(self))
    }
}

fn checked_dim(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::Invalid(format!("dims {dims:?}: need at least one subsystem, each of dimension >= 2")));
    }
    Ok(dims.iter().product())
}

pub fn load_density(path: &Path) -> Result<DensityMatrix> {
    MatrixFile::load(path)?.to_density()
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

pub(crate) fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub seed: u64,
    pub generations: usize,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

/// Allowed gap between the stored `mu` and `-Tr(W)/D`.
const MU_TOL: f64 = 1e-9;

impl WitnessFile {
    pub fn from_witness(w: &Witness, provenance: Option<Provenance>) -> Self {
        WitnessFile {
            dims: w.dims().to_vec(),
            re: w.matrix().real_parts(),
            im: w.matrix().imag_parts(),
            mu: w.mu(),
            provenance,
        }
    }

    pub fn to_witness(&self) -> Result<Witness> {
        let n = checked_dim(&self.dims)?;
        let m = CMatrix::from_parts(n, n, &self.re, &self.im)?;
        let w = Witness::from_matrix(m, &self.dims)?;
        if (w.mu() - self.mu).abs() > MU_TOL {
            return Err(Error::Invalid(format!(
                "witness mu = {} disagrees with -Tr(W)/D = {}",
                self.mu,
                w.mu()
            )));
        }
        Ok(w)
    }

    pub fn load(path: &Path) -> Result<Self> {
        parse(path)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write(path, &to_pretty(self))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub pass: bool,
    pub target_value: f64,
    pub separable_min: f64,
    pub budget: usize,
    pub seed: u64,
    pub failure: Option<String>,
    pub claim: String,
}

impl From<&VerificationReport> for VerificationJson {
    fn from(r: &VerificationReport) -> Self {
        VerificationJson {
            pass: r.pass,
            target_value: r.target_value,
            separable_min: r.separable_min,
            budget: r.budget,
            seed: r.seed,
            failure: r.failure.map(|f| f.to_string()),
            claim: r.claim().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Coefficients over the product generator basis, first subsystem slowest.
    pub tau: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsJson {
    pub pop_size: usize,
    pub generations: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub tournament_size: usize,
    pub elite_count: usize,
    pub tau_bound: f64,
    pub n_probe: usize,
    pub n_refine: usize,
    pub max_iters: usize,
    pub grad_step: f64,
    pub conv_tol: f64,
    pub verify_budget: usize,
    pub certify_candidates: usize,
    pub boost_factor: usize,
}

impl SettingsJson {
    fn new(ga: &GaConfig, inner: &InnerMinConfig, opts: &MeasureOptions) -> Self {
        SettingsJson {
            pop_size: ga.pop_size,
            generations: ga.generations,
            p_crossover: ga.p_crossover,
            p_mutation: ga.p_mutation,
            tournament_size: ga.tournament_size,
            elite_count: ga.elite_count,
            tau_bound: ga.tau_bound,
            n_probe: inner.n_probe,
            n_refine: inner.n_refine,
            max_iters: inner.max_iters,
            grad_step: inner.grad_step,
            conv_tol: inner.conv_tol,
            verify_budget: opts.verify_budget,
            certify_candidates: opts.certify_candidates,
            boost_factor: opts.boost_factor,
        }
    }
}

/// Everything needed to inspect or replay one measure computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub e_value: f64,
    pub verdict: String,
    pub best_fitness: f64,
    pub search_fitness: f64,
    pub mu: f64,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub z: ObservableJson,
    pub witness: WitnessFile,
    pub verification: Option<VerificationJson>,
    pub settings: SettingsJson,
    pub trace: Vec<TraceRow>,
}

impl MeasureReport {
    pub fn new(r: &MeasureResult) -> Self {
        let provenance = Provenance { seed: r.seed(), generations: r.ga.generations, fitness: r.best_fitness };
        MeasureReport {
            e_value: r.e_value,
            verdict: r.verdict.as_str().to_string(),
            best_fitness: r.best_fitness,
            search_fitness: r.search_fitness,
            mu: r.mu,
            dims: r.best_z.dims().to_vec(),
            seed: r.seed(),
            z: ObservableJson {
                re: r.best_z.matrix().real_parts(),
                im: r.best_z.matrix().imag_parts(),
                tau: r.best_z.tau().values().to_vec(),
            },
            witness: WitnessFile::from_witness(&r.witness, Some(provenance)),
            verification: r.verification.as_ref().map(VerificationJson::from),
            settings: SettingsJson::new(&r.ga, &r.inner, &r.options),
            trace: trace_rows(&r.trace),
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }
}

fn trace_rows(t: &GaTrace) -> Vec<TraceRow> {
    t.records
        .iter()
        .map(|r| TraceRow { generation: r.generation, best_fitness: r.best_fitness, mean_fitness: r.mean_fitness })
        .collect()
}
