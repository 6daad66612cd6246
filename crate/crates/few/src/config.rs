//! Run configuration loaded from TOML.
//!
//! Every field is optional. Missing values fall back to the per-system
//! defaults of the core crate, so one file serves any state family.
//!
//! ```toml
//! [ga]
//! pop_size = 350
//! generations = 80
//!
//! [inner]
//! n_probe = 400
//! n_refine = 5
//!
//! [measure]
//! verify_budget = 100000
//!
//! [run]
//! seed = 7
//! jobs = 4
//! format = "csv"
//! ```

use std::path::{Path, PathBuf};

use few_core::{GaConfig, InnerMinConfig, MeasureOptions};
use serde::{Deserialize, Serialize};

use crate::error::{read, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pop_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_crossover: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_mutation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tournament_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elite_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_bound: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InnerSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_probe: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_refine: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conv_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify_budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certify_candidates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boost_factor: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Worker threads; all cores when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub ga: GaSection,
    pub inner: InnerSection,
    pub measure: MeasureSection,
    pub run: RunSection,
}

/// Fully populated settings for one system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub ga: GaConfig,
    pub inner: InnerMinConfig,
    pub measure: MeasureOptions,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg = Self::from_toml(&read(path)?).map_err(|source| Error::Config { path: path.to_path_buf(), source })?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.run.seed.unwrap_or(0)
    }

    /// Checks the values that do not depend on the system.
    pub fn check(&self) -> Result<()> {
        if self.run.jobs == Some(0) {
            return Err(Error::Invalid("jobs must be at least 1".into()));
        }
        if self.measure.verify_budget == Some(0) {
            return Err(Error::Invalid("verify_budget must be at least 1".into()));
        }
        // validate against a representative system so bad values fail early
        self.settings(&[2, 2]).map(|_| ())
    }

    /// Fills unset fields with the defaults for `dims` and validates.
    pub fn settings(&self, dims: &[usize]) -> Result<Settings> {
        let g = &self.ga;
        let base = GaConfig::for_dims(dims);
        let ga = GaConfig {
            pop_size: g.pop_size.unwrap_or(base.pop_size),
            generations: g.generations.unwrap_or(base.generations),
            p_crossover: g.p_crossover.unwrap_or(base.p_crossover),
            p_mutation: g.p_mutation.unwrap_or(base.p_mutation),
            tournament_size: g.tournament_size.unwrap_or(base.tournament_size),
            elite_count: g.elite_count.unwrap_or(base.elite_count),
            tau_bound: g.tau_bound.unwrap_or(base.tau_bound),
            seed: self.seed(),
        };
        ga.validate()?;
        let i = &self.inner;
        let base = InnerMinConfig::for_dims(dims);
        let inner = InnerMinConfig {
            n_probe: i.n_probe.unwrap_or(base.n_probe),
            n_refine: i.n_refine.unwrap_or(base.n_refine),
            max_iters: i.max_iters.unwrap_or(base.max_iters),
            grad_step: i.grad_step.unwrap_or(base.grad_step),
            conv_tol: i.conv_tol.unwrap_or(base.conv_tol),
        };
        inner.validate()?;
        let m = &self.measure;
        let base = MeasureOptions::default();
        let measure = MeasureOptions {
            verify_budget: m.verify_budget.unwrap_or(base.verify_budget),
            certify_candidates: m.certify_candidates.unwrap_or(base.certify_candidates),
            boost_factor: m.boost_factor.unwrap_or(base.boost_factor),
        };
        if measure.verify_budget == 0 {
            return Err(Error::Invalid("verify_budget must be at least 1".into()));
        }
        Ok(Settings { ga, inner, measure })
    }

    /// Config with every field set to the resolved value for `dims`.
    pub fn resolved(&self, dims: &[usize]) -> Result<Self> {
        let s = self.settings(dims)?;
        Ok(RunConfig {
            ga: GaSection {
                pop_size: Some(s.ga.pop_size),
                generations: Some(s.ga.generations),
                p_crossover: Some(s.ga.p_crossover),
                p_mutation: Some(s.ga.p_mutation),
                tournament_size: Some(s.ga.tournament_size),
                elite_count: Some(s.ga.elite_count),
                tau_bound: Some(s.ga.tau_bound),
            },
            inner: InnerSection {
                n_probe: Some(s.inner.n_probe),
                n_refine: Some(s.inner.n_refine),
                max_iters: Some(s.inner.max_iters),
                grad_step: Some(s.inner.grad_step),
                conv_tol: Some(s.inner.conv_tol),
            },
            measure: MeasureSection {
                verify_budget: Some(s.measure.verify_budget),
                certify_candidates: Some(s.measure.certify_candidates),
                boost_factor: Some(s.measure.boost_factor),
            },
            run: RunSection { seed: Some(self.seed()), ..self.run.clone() },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_system_defaults() {
        let cfg = RunConfig::from_toml("").unwrap();
        let s = cfg.settings(&[2, 2]).unwrap();
        assert_eq!(s.ga.pop_size, 300);
        assert_eq!(s.inner.n_probe, 400);
        let s = cfg.settings(&[3, 3]).unwrap();
        assert_eq!(s.inner.n_probe, 800);
        assert_eq!(s.measure.verify_budget, 100_000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("[ga]\npopulation = 3\n").is_err());
        assert!(RunConfig::from_toml("[gaa]\n").is_err());
        assert!(RunConfig::from_toml("[run]\nformat = \"xml\"\n").is_err());
    }

    #[test]
    fn invalid_values_fail_validation() {
        let cfg = RunConfig::from_toml("[ga]\np_mutation = 1.5\n").unwrap();
        assert!(cfg.check().is_err());
        let cfg = RunConfig::from_toml("[inner]\nn_probe = 2\nn_refine = 5\n").unwrap();
        assert!(cfg.check().is_err());
        let cfg = RunConfig::from_toml("[run]\njobs = 0\n").unwrap();
        assert!(cfg.check().is_err());
    }

    #[test]
    fn dump_then_load_is_identity() {
        let text = "[ga]\npop_size = 350\ngenerations = 80\n\n[inner]\ngrad_step = 1e-5\n\n[run]\nseed = 7\nformat = \"json\"\n";
        let cfg = RunConfig::from_toml(text).unwrap();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let full = cfg.resolved(&[2, 2, 2]).unwrap();
        assert_eq!(RunConfig::from_toml(&full.to_toml()).unwrap(), full);
        assert_eq!(full.settings(&[2, 2, 2]).unwrap(), cfg.settings(&[2, 2, 2]).unwrap());
    }
}
