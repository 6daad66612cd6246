//! `few compute | sweep | verify | oracle`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use few_core::innermin::grid_oracle;
use few_core::measure::compute_few_measure_with;
use few_core::qn::QnSettings;
use few_core::witness::{expectation, verify_witness_with, TracelessObservable};
use few_core::{MeasureResult, VerificationReport};

use crate::config::{Format, RunConfig};
use crate::error::{write, Error, Result};
use crate::family::{Family, RangeSpec, StateSpec};
use crate::json::{to_pretty, MatrixFile, MeasureReport, WitnessFile};
use crate::numfmt::sig6;
use crate::parallel::{with_jobs, RayonMap};
use crate::sweep::{run_sweep, to_csv};

#[derive(Debug, Parser)]
#[command(name = "few", version, about = "Floating entanglement witness measure")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true, env = "FEW_SEED")]
    pub seed: Option<u64>,
    /// Output file (stdout for sweeps when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub tuning: Tuning,
    #[command(subcommand)]
    pub command: Command,
}

/// Overrides for the most commonly tuned budgets.
#[derive(Debug, Args)]
pub struct Tuning {
    /// GA population size.
    #[arg(long, global = true)]
    pub pop: Option<usize>,
    #[arg(long, global = true)]
    pub generations: Option<usize>,
    /// Random probes per inner minimization.
    #[arg(long, global = true)]
    pub n_probe: Option<usize>,
    /// Probes refined by quasi-Newton descent.
    #[arg(long, global = true)]
    pub n_refine: Option<usize>,
    /// Product-state samples when certifying a witness.
    #[arg(long, global = true)]
    pub verify_budget: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute E(rho) for one state.
    Compute {
        /// bell:ij, werner:F, ghzw:q, qutrit:alpha, or a JSON matrix file.
        state: String,
    },
    /// Compute E over a parameter grid of a state family.
    Sweep {
        /// werner, ghzw or qutrit.
        family: String,
        /// start:stop:step, inclusive.
        range: String,
    },
    /// Check a witness file against a state.
    Verify {
        witness: PathBuf,
        state: String,
        /// Refined product-state samples.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Grid minimum of Tr(Z rho_s) over product states.
    Oracle {
        /// JSON file with dims, re, im of a traceless Hermitian matrix.
        z: PathBuf,
        /// Comma-separated subsystem dimensions; taken from the file when omitted.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Grid points per angle.
        #[arg(long, default_value_t = 41)]
        resolution: usize,
    },
}

/// Parses arguments, runs the command and returns the process exit code:
/// 0 on success, 1 for a failed verification, 2 for invalid input.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let t = &cli.tuning;
    cfg.run.seed = cli.seed.or(cfg.run.seed);
    cfg.run.jobs = cli.jobs.or(cfg.run.jobs);
    cfg.run.out = cli.out.clone().or(cfg.run.out);
    cfg.run.format = cli.format.or(cfg.run.format);
    cfg.ga.pop_size = t.pop.or(cfg.ga.pop_size);
    cfg.ga.generations = t.generations.or(cfg.ga.generations);
    cfg.inner.n_probe = t.n_probe.or(cfg.inner.n_probe);
    cfg.inner.n_refine = t.n_refine.or(cfg.inner.n_refine);
    cfg.measure.verify_budget = t.verify_budget.or(cfg.measure.verify_budget);
    cfg.check()?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<i32> {
    let cfg = effective_config(&cli)?;
    match &cli.command {
        Command::Compute { state } => compute(state, &cfg),
        Command::Sweep { family, range } => sweep(family, range, &cfg),
        Command::Verify { witness, state, budget } => verify(witness, state, *budget, &cfg),
        Command::Oracle { z, dims, resolution } => oracle(z, dims.as_deref(), *resolution),
    }
}

fn compute(state: &str, cfg: &RunConfig) -> Result<i32> {
    let rho = state.parse::<StateSpec>()?.load()?;
    let s = cfg.settings(rho.dims())?;
    let r = with_jobs(cfg.run.jobs, || compute_few_measure_with(&rho, &s.ga, &s.inner, &s.measure, &RayonMap))??;
    print!("{}", summary(state, &r, expectation(&r.best_z, &rho)?));
    if let Some(path) = &cfg.run.out {
        let text = match cfg.run.format.unwrap_or(Format::Json) {
            Format::Json => MeasureReport::new(&r).to_json(),
            Format::Csv => r.trace.to_csv(),
        };
        write(path, &text)?;
    }
    Ok(0)
}

fn summary(state: &str, r: &MeasureResult, target: f64) -> String {
    let mut out = format!(
        "state      {state}\nE          {}\nverdict    {}\nmu         {}\nTr(Z rho)  {}\n",
        sig6(r.e_value),
        r.verdict.as_str(),
        sig6(r.mu),
        sig6(target)
    );
    match &r.verification {
        Some(v) => out.push_str(&format!(
            "witness    Tr(W rho) = {}, min Tr(W rho_s) = {} over {} samples\n",
            sig6(v.target_value),
            sig6(v.separable_min),
            v.budget
        )),
        None => out.push_str(&format!("witness    none certified (search fitness {})\n", sig6(r.search_fitness))),
    }
    out.push_str(&format!("seed       {}\n", r.seed()));
    out
}

fn sweep(family: &str, range: &str, cfg: &RunConfig) -> Result<i32> {
    let family: Family = family.parse()?;
    let range: RangeSpec = range.parse()?;
    // fail before any work if a grid point is out of range
    range.check(family)?;
    let rows = run_sweep(family, &range, cfg)?;
    let text = match cfg.run.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(&rows),
        Format::Json => to_pretty(&rows),
    };
    match &cfg.run.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn verify(witness: &Path, state: &str, budget: Option<usize>, cfg: &RunConfig) -> Result<i32> {
    let w = WitnessFile::load(witness)?.to_witness()?;
    let rho = state.parse::<StateSpec>()?.load()?;
    if w.dims() != rho.dims() {
        return Err(Error::Invalid(format!("witness dims {:?} do not match state dims {:?}", w.dims(), rho.dims())));
    }
    let budget = match budget {
        Some(b) => b,
        None => cfg.settings(rho.dims())?.measure.verify_budget,
    };
    let seed = cfg.seed();
    let report = with_jobs(cfg.run.jobs, || {
        verify_witness_with(&w, &rho, budget, seed, &QnSettings::default(), &RayonMap)
    })??;
    print!("{}", verification_text(&report));
    Ok(if report.pass { 0 } else { 1 })
}

fn verification_text(r: &VerificationReport) -> String {
    let status = if r.pass { "pass" } else { "fail" };
    let mut out = format!(
        "result           {status}\nTr(W rho)        {}\nmin Tr(W rho_s)  {}\nbudget           {}\nseed             {}\n",
        sig6(r.target_value),
        sig6(r.separable_min),
        r.budget,
        r.seed
    );
    if let Some(f) = r.failure {
        out.push_str(&format!("failure          {f}\n"));
    }
    out.push_str(&format!("claim            {}\n", r.claim()));
    out
}

fn oracle(path: &Path, dims: Option<&[usize]>, resolution: usize) -> Result<i32> {
    let file = MatrixFile::load(path)?;
    let m = file.to_matrix()?;
    let dims = dims.unwrap_or(&file.dims);
    if dims.iter().product::<usize>() != m.rows() {
        return Err(Error::Invalid(format!("dims {dims:?} do not match a {}x{} matrix", m.rows(), m.cols())));
    }
    // validates Hermiticity and tracelessness
    let z = TracelessObservable::from_matrix(m, dims)?;
    let min = grid_oracle(z.matrix(), dims, resolution)?;
    println!("{min:.10}");
    Ok(0)
}
