//! Parameter sweeps over a state family.

use few_core::measure::compute_few_measure_with;
use few_core::seed;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::family::{Family, RangeSpec};
use crate::numfmt::sig6;
use crate::parallel::{with_jobs, RayonMap};

const STREAM_SWEEP: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub e_value: f64,
    pub verdict: &'static str,
    pub mu: f64,
    pub best_fitness: f64,
    /// Seed that replays this point with `few compute`.
    pub seed: u64,
}

/// Seed of grid point `index` under `master`.
pub fn point_seed(master: u64, index: usize) -> u64 {
    seed::derive(master, &[STREAM_SWEEP, index as u64])
}

/// Validates every grid point, then measures them concurrently. Rows come
/// back in parameter order whatever the thread count.
pub fn run_sweep(family: Family, range: &RangeSpec, cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let points = range.check(family)?;
    let dims = family.state(points[0])?.dims().to_vec();
    let settings = cfg.settings(&dims)?;
    let master = cfg.seed();
    with_jobs(cfg.run.jobs, || {
        points
            .par_iter()
            .enumerate()
            .map(|(i, &p)| {
                let rho = family.state(p)?;
                let ga = few_core::GaConfig { seed: point_seed(master, i), ..settings.ga };
                let r = compute_few_measure_with(&rho, &ga, &settings.inner, &settings.measure, &RayonMap)?;
                Ok(SweepRow {
                    parameter: p,
                    e_value: r.e_value,
                    verdict: r.verdict.as_str(),
                    mu: r.mu,
                    best_fitness: r.best_fitness,
                    seed: ga.seed,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?
}

pub const CSV_HEADER: &str = "parameter,e_value,verdict,mu,best_fitness,seed";

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            sig6(r.parameter),
            sig6(r.e_value),
            r.verdict,
            sig6(r.mu),
            sig6(r.best_fitness),
            r.seed
        ));
    }
    out
}
