//! Genetic search over traceless observables.
//!
//! Each chromosome packs 15 bits per coefficient of the product basis (the
//! all-identity coefficient is not encoded). Fitness is
//! `min_{rho_s} Tr(Z rho_s) - Tr(Z rho)` for the decoded, normalized `Z`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{FewError, Result};
use crate::innermin::{min_product_expectation, InnerMinConfig};
use crate::par::{ParallelMap, Sequential};
use crate::qops::ProductBasis;
use crate::seed;
use crate::states::{param_count, DensityMatrix};
use crate::witness::{expectation, CoefficientTensor, TracelessObservable};

pub const BITS_PER_COEFF: usize = 15;
const MAX_GROUP: u32 = (1 << BITS_PER_COEFF) - 1;

const STREAM_BREED: u64 = 1;
const STREAM_FITNESS: u64 = 2;

/// Fixed-length bit string, packed little-endian into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chromosome {
    words: Vec<u64>,
    len: usize,
}

impl Chromosome {
    pub fn zeros(len: usize) -> Self {
        Chromosome { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn ones(len: usize) -> Self {
        let mut c = Self::zeros(len);
        for i in 0..len {
            c.set(i, true);
        }
        c
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut c = Self::zeros(len);
        for w in c.words.iter_mut() {
            *w = rng.gen();
        }
        c.clear_tail();
        c
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut c = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            c.set(i, b);
        }
        c
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = s
            .chars()
            .map(|ch| match ch {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| Self::from_bits(&b))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// 64-bit FNV-1a over the packed words.
    pub fn hash64(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for w in &self.words {
            for b in w.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }

    pub fn to_bit_string(&self) -> alloc::string::String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Unsigned value of bits `[start, start + 15)`, most significant first.
    fn group(&self, start: usize) -> u32 {
        (0..BITS_PER_COEFF).fold(0, |acc, k| (acc << 1) | self.get(start + k) as u32)
    }
}

/// Number of encoded coefficients, `prod d_i^2 - 1`.
pub fn coefficient_count(dims: &[usize]) -> usize {
    dims.iter().map(|d| d * d).product::<usize>() - 1
}

pub fn chromosome_len(dims: &[usize]) -> usize {
    BITS_PER_COEFF * coefficient_count(dims)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub p_crossover: f64,
    /// Per-bit flip probability.
    pub p_mutation: f64,
    pub tournament_size: usize,
    /// Best individuals copied unchanged into the next generation.
    pub elite_count: usize,
    /// Coefficients decode onto `[-tau_bound, tau_bound]`.
    pub tau_bound: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            pop_size: 300,
            generations: 300,
            p_crossover: 0.7,
            p_mutation: 0.007,
            tournament_size: 2,
            elite_count: 2,
            tau_bound: 1.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    /// Population of 20x the coefficient count for two qubits, 10x otherwise.
    pub fn for_dims(dims: &[usize]) -> Self {
        let params = coefficient_count(dims);
        let factor = if dims == [2, 2] { 20 } else { 10 };
        GaConfig { pop_size: factor * params, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FewError::InvalidConfig(m.into()));
        if self.pop_size < 2 {
            return bad("pop_size must be at least 2");
        }
        if self.generations == 0 {
            return bad("generations must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.p_crossover) || !(0.0..=1.0).contains(&self.p_mutation) {
            return bad("probabilities must lie in [0, 1]");
        }
        if self.tournament_size < 2 {
            return bad("tournament_size must be at least 2");
        }
        if self.elite_count >= self.pop_size {
            return bad("elite_count must be smaller than pop_size");
        }
        if !(self.tau_bound > 0.0 && self.tau_bound.is_finite()) {
            return bad("tau_bound must be positive");
        }
        Ok(())
    }
}

/// Maps each 15-bit group linearly onto `[-tau_bound, tau_bound]`.
pub fn decode(c: &Chromosome, tau_bound: f64, dims: &[usize]) -> Result<CoefficientTensor> {
    let expected = chromosome_len(dims);
    if c.len() != expected {
        return Err(FewError::DimensionMismatch { expected, found: c.len() });
    }
    let mut values = Vec::with_capacity(coefficient_count(dims) + 1);
    values.push(0.0);
    for k in 0..coefficient_count(dims) {
        let g = c.group(k * BITS_PER_COEFF) as f64;
        values.push(-tau_bound + g / MAX_GROUP as f64 * 2.0 * tau_bound);
    }
    let shape = dims.iter().map(|d| d * d).collect();
    CoefficientTensor::new(shape, values, -tau_bound, tau_bound)
}

/// Nearest lattice chromosome for `tau` (entry 0 ignored). Inverse of
/// [`decode`] on lattice points.
pub fn encode(tau: &[f64], tau_bound: f64) -> Chromosome {
    let n = tau.len() - 1;
    let mut c = Chromosome::zeros(n * BITS_PER_COEFF);
    for (k, &t) in tau.iter().skip(1).enumerate() {
        let g = libm::round((t + tau_bound) / (2.0 * tau_bound) * MAX_GROUP as f64).clamp(0.0, MAX_GROUP as f64) as u32;
        for b in 0..BITS_PER_COEFF {
            let bit = (g >> (BITS_PER_COEFF - 1 - b)) & 1 == 1;
            c.set(k * BITS_PER_COEFF + b, bit);
        }
    }
    c
}

/// Swaps bits `[cut1, cut2)` between two parents.
pub fn two_point_crossover(a: &Chromosome, b: &Chromosome, cut1: usize, cut2: usize) -> (Chromosome, Chromosome) {
    let (lo, hi) = if cut1 <= cut2 { (cut1, cut2) } else { (cut2, cut1) };
    let mut x = a.clone();
    let mut y = b.clone();
    for i in lo..hi.min(a.len()) {
        let (ba, bb) = (a.get(i), b.get(i));
        x.set(i, bb);
        y.set(i, ba);
    }
    (x, y)
}

/// Flips each bit independently with probability `p`.
pub fn mutate<R: Rng + ?Sized>(c: &mut Chromosome, p: f64, rng: &mut R) {
    if p <= 0.0 {
        return;
    }
    for i in 0..c.len() {
        if rng.gen::<f64>() < p {
            c.flip(i);
        }
    }
}

/// Index of the fittest of `size` uniform draws (with replacement); the
/// earliest draw wins ties.
pub fn tournament<R: Rng + ?Sized>(fitnesses: &[f64], size: usize, rng: &mut R) -> usize {
    let mut best = rng.gen_range(0..fitnesses.len());
    for _ in 1..size {
        let k = rng.gen_range(0..fitnesses.len());
        if fitnesses[k] > fitnesses[best] {
            best = k;
        }
    }
    best
}

/// Indices sorted by descending fitness, lower index first on ties.
fn ranking(fitnesses: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitnesses.len()).collect();
    order.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]));
    order
}

/// Next generation: elites verbatim, the rest bred by tournament selection,
/// two-point crossover and bit-flip mutation.
pub fn evolve<R: Rng + ?Sized>(pop: &[Chromosome], fitnesses: &[f64], cfg: &GaConfig, rng: &mut R) -> Vec<Chromosome> {
    assert_eq!(pop.len(), fitnesses.len());
    let mut next = Vec::with_capacity(cfg.pop_size);
    for &i in ranking(fitnesses).iter().take(cfg.elite_count.min(pop.len())) {
        next.push(pop[i].clone());
    }
    let len = pop[0].len();
    while next.len() < cfg.pop_size {
        let a = &pop[tournament(fitnesses, cfg.tournament_size, rng)];
        let b = &pop[tournament(fitnesses, cfg.tournament_size, rng)];
        let (mut x, mut y) = if rng.gen::<f64>() < cfg.p_crossover {
            let c1 = rng.gen_range(0..=len);
            let mut c2 = rng.gen_range(0..=len);
            while c2 == c1 && len > 0 {
                c2 = rng.gen_range(0..=len);
            }
            two_point_crossover(a, b, c1, c2)
        } else {
            (a.clone(), b.clone())
        };
        mutate(&mut x, cfg.p_mutation, rng);
        mutate(&mut y, cfg.p_mutation, rng);
        next.push(x);
        if next.len() < cfg.pop_size {
            next.push(y);
        }
    }
    next
}

/// Inner minimum, target expectation and their difference for one `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    /// `min Tr(Z rho_s)`.
    pub mu: f64,
    /// `Tr(Z rho)`.
    pub target: f64,
    pub z: Option<TracelessObservable>,
}

/// Shared state for evaluating chromosomes against one target.
pub struct FitnessContext<'a> {
    rho: &'a DensityMatrix,
    basis: ProductBasis,
    inner: InnerMinConfig,
    tau_bound: f64,
}

impl<'a> FitnessContext<'a> {
    pub fn new(rho: &'a DensityMatrix, tau_bound: f64, inner: &InnerMinConfig) -> Result<Self> {
        inner.validate()?;
        param_count(rho.dims())?;
        Ok(FitnessContext { rho, basis: ProductBasis::new(rho.dims())?, inner: *inner, tau_bound })
    }

    pub fn basis(&self) -> &ProductBasis {
        &self.basis
    }

    /// Decoded and normalized observable, or `None` for the zero operator.
    pub fn observable(&self, c: &Chromosome) -> Result<Option<TracelessObservable>> {
        let tau = decode(c, self.tau_bound, self.rho.dims())?;
        let z = TracelessObservable::from_tensor(tau, &self.basis)?;
        match z.normalize() {
            Ok(z) => Ok(Some(z)),
            Err(FewError::ZeroOperator) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn evaluate<R: Rng + ?Sized>(&self, c: &Chromosome, rng: &mut R) -> Result<Evaluation> {
        let Some(z) = self.observable(c)? else {
            return Ok(Evaluation { fitness: f64::NEG_INFINITY, mu: 0.0, target: 0.0, z: None });
        };
        let inner = min_product_expectation(z.matrix(), self.rho.dims(), &self.inner, rng)?;
        let target = expectation(&z, self.rho)?;
        Ok(Evaluation { fitness: inner.mu - target, mu: inner.mu, target, z: Some(z) })
    }
}

/// `min Tr(Z rho_s) - Tr(Z rho)` for the decoded chromosome; `-inf` when it
/// decodes to the zero operator.
pub fn fitness<R: Rng + ?Sized>(
    c: &Chromosome,
    rho: &DensityMatrix,
    cfg: &GaConfig,
    inner: &InnerMinConfig,
    rng: &mut R,
) -> Result<f64> {
    Ok(FitnessContext::new(rho, cfg.tau_bound, inner)?.evaluate(c, rng)?.fitness)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    /// Mean over finite fitness values.
    pub mean_fitness: f64,
    pub best_hash: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GaTrace {
    pub records: Vec<GenerationRecord>,
}

impl GaTrace {
    /// `generation,best_fitness,mean_fitness` lines with a header.
    pub fn to_csv(&self) -> alloc::string::String {
        let mut out = alloc::string::String::from("generation,best_fitness,mean_fitness\n");
        for r in &self.records {
            out.push_str(&format!("{},{:e},{:e}\n", r.generation, r.best_fitness, r.mean_fitness));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub best: Chromosome,
    pub best_fitness: f64,
    /// Stream coordinates `(generation, index)` of the best individual's
    /// first evaluation; replaying them reproduces its inner minimum.
    pub best_origin: (usize, usize),
    pub trace: GaTrace,
    /// Final population with fitness, in population order.
    pub final_population: Vec<(Chromosome, f64)>,
}

impl GaOutcome {
    /// Distinct chromosomes of the final population, fittest first.
    pub fn ranked_distinct(&self) -> Vec<(Chromosome, f64)> {
        let mut seen = BTreeMap::new();
        let mut out = Vec::new();
        let fit: Vec<f64> = self.final_population.iter().map(|(_, f)| *f).collect();
        for i in ranking(&fit) {
            let (c, f) = &self.final_population[i];
            if seen.insert(c.clone(), ()).is_none() {
                out.push((c.clone(), *f));
            }
        }
        out
    }
}

/// Stream seed for the fitness evaluation of individual `index` in `generation`.
pub fn fitness_seed(master: u64, generation: usize, index: usize) -> u64 {
    seed::derive(master, &[STREAM_FITNESS, generation as u64, index as u64])
}

pub fn run_ga(rho: &DensityMatrix, cfg: &GaConfig, inner: &InnerMinConfig) -> Result<GaOutcome> {
    run_ga_with(rho, cfg, inner, &Sequential)
}

/// Runs `cfg.generations` evaluated generations (the random initial
/// population counts as the first). Fitness values are cached by chromosome,
/// so survivors keep the value from their first evaluation.
pub fn run_ga_with(
    rho: &DensityMatrix,
    cfg: &GaConfig,
    inner: &InnerMinConfig,
    map: &dyn ParallelMap,
) -> Result<GaOutcome> {
    cfg.validate()?;
    let ctx = FitnessContext::new(rho, cfg.tau_bound, inner)?;
    let len = chromosome_len(rho.dims());
    let mut breed = seed::derived_rng(cfg.seed, &[STREAM_BREED]);
    let mut pop: Vec<Chromosome> = (0..cfg.pop_size).map(|_| Chromosome::random(len, &mut breed)).collect();

    let mut cache: BTreeMap<Chromosome, (f64, usize, usize)> = BTreeMap::new();
    let mut trace = GaTrace::default();
    let mut best: Option<(Chromosome, f64, (usize, usize))> = None;
    let mut fitnesses = Vec::new();

    for generation in 0..cfg.generations {
        if generation > 0 {
            pop = evolve(&pop, &fitnesses, cfg, &mut breed);
        }
        let mut pending: Vec<usize> = Vec::new();
        let mut claimed = BTreeMap::new();
        for (i, c) in pop.iter().enumerate() {
            if !cache.contains_key(c) && claimed.insert(c.clone(), i).is_none() {
                pending.push(i);
            }
        }
        let fresh = map.map_indexed(pending.len(), &|k| {
            let i = pending[k];
            let mut rng = seed::rng(fitness_seed(cfg.seed, generation, i));
            ctx.evaluate(&pop[i], &mut rng).map(|e| e.fitness).unwrap_or(f64::NEG_INFINITY)
        });
        for (&i, f) in pending.iter().zip(fresh) {
            cache.insert(pop[i].clone(), (f, generation, i));
        }
        fitnesses = pop.iter().map(|c| cache[c].0).collect();

        let top = ranking(&fitnesses)[0];
        let top_fit = fitnesses[top];
        if best.as_ref().is_none_or(|(_, f, _)| top_fit > *f) {
            let (_, g, i) = cache[&pop[top]];
            best = Some((pop[top].clone(), top_fit, (g, i)));
        }
        let finite: Vec<f64> = fitnesses.iter().copied().filter(|f| f.is_finite()).collect();
        let mean = if finite.is_empty() { f64::NEG_INFINITY } else { finite.iter().sum::<f64>() / finite.len() as f64 };
        trace.records.push(GenerationRecord {
            generation,
            best_fitness: top_fit,
            mean_fitness: mean,
            best_hash: pop[top].hash64(),
        });
    }

    let (best, best_fitness, best_origin) = best.expect("at least one generation");
    let final_population = pop.into_iter().zip(fitnesses).collect();
    Ok(GaOutcome { best, best_fitness, best_origin, trace, final_population })
}
