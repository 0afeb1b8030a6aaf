//! Seeded random instance generation.
//!
//! Each trial draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `trial`,
//! so a `(seed, trial)` pair always reproduces the same instance.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::space::{FiniteMeasureSpace, MFunc, Partition};
use crate::wct::WctInstance;

/// Which corner of the instance space to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Independent `u`, `w` on a random partition.
    Generic,
    /// `w = k·ū` with `k` block-constant, which makes `T` normal.
    Normal,
    /// The full algebra: `T` is the multiplication operator `M_{uw}`.
    Singleton,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Generic => "generic",
            Family::Normal => "normal",
            Family::Singleton => "singleton",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(Family::Generic),
            "normal" => Ok(Family::Normal),
            "singleton" => Ok(Family::Singleton),
            other => Err(Error::Parameter(format!("unknown family {other:?} (generic|normal|singleton)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_min: usize,
    pub n_max: usize,
    /// Largest block count; `None` allows up to `n` blocks.
    pub max_blocks: Option<usize>,
    /// Masses are log-uniform in `[mass_min, mass_max]`.
    pub mass_min: f64,
    pub mass_max: f64,
    /// Probability that `u` (resp. `w`) is zeroed on a block.
    pub zero_prob_u: f64,
    pub zero_prob_w: f64,
    pub family: Family,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_min: 2,
            n_max: 16,
            max_blocks: None,
            mass_min: 0.1,
            mass_max: 10.0,
            zero_prob_u: 0.3,
            zero_prob_w: 0.3,
            family: Family::Generic,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2 <= self.n_min && self.n_min <= self.n_max && self.n_max <= 64) {
            return Err(Error::Parameter(format!(
                "n range [{}, {}] must lie within [2, 64]",
                self.n_min, self.n_max
            )));
        }
        if !(0.0 < self.mass_min && self.mass_min <= self.mass_max) {
            return Err(Error::Parameter("mass range must be positive and ordered".into()));
        }
        for p in [self.zero_prob_u, self.zero_prob_w] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("zeroing probability {p} outside [0, 1]")));
            }
        }
        if self.max_blocks == Some(0) {
            return Err(Error::Parameter("max_blocks must be positive".into()));
        }
        Ok(())
    }
}

fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize, max_blocks: usize) -> Partition {
    let m = rng.random_range(1..=max_blocks.min(n));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(m - 1).collect();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(m);
    let mut start = 0;
    for end in cuts.into_iter().chain(std::iter::once(n)) {
        let mut block = idx[start..end].to_vec();
        block.sort_unstable();
        blocks.push(block);
        start = end;
    }
    Partition::new(n, blocks).expect("cut points yield a valid partition")
}

/// The instance for trial `trial` of a campaign.
pub fn gen_trial(cfg: &GeneratorConfig, trial: u64) -> WctInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);

    let n = rng.random_range(cfg.n_min..=cfg.n_max);
    let (lo, hi) = (cfg.mass_min.ln(), cfg.mass_max.ln());
    let masses: Vec<f64> = (0..n)
        .map(|_| if hi > lo { rng.random_range(lo..hi).exp() } else { cfg.mass_min })
        .collect();
    let part = match cfg.family {
        Family::Singleton => Partition::singletons(n),
        _ => random_partition(&mut rng, n, cfg.max_blocks.unwrap_or(n)),
    };
    let blocks = part.num_blocks();
    let zero_u: Vec<bool> = (0..blocks).map(|_| rng.random_bool(cfg.zero_prob_u)).collect();
    let zero_w: Vec<bool> = (0..blocks).map(|_| rng.random_bool(cfg.zero_prob_w)).collect();

    let zero = Complex64::new(0.0, 0.0);
    let u: Vec<Complex64> = (0..n)
        .map(|i| {
            let z = complex_normal(&mut rng);
            if zero_u[part.block_of(i)] { zero } else { z }
        })
        .collect();
    let w: Vec<Complex64> = match cfg.family {
        Family::Normal => {
            let k: Vec<Complex64> = (0..blocks)
                .map(|b| {
                    let z = complex_normal(&mut rng);
                    if zero_w[b] { zero } else { z }
                })
                .collect();
            (0..n).map(|i| k[part.block_of(i)] * u[i].conj()).collect()
        }
        _ => (0..n)
            .map(|i| {
                let z = complex_normal(&mut rng);
                if zero_w[part.block_of(i)] { zero } else { z }
            })
            .collect(),
    };

    let space = FiniteMeasureSpace::new(masses).expect("generated masses are positive");
    WctInstance::build(space, part, MFunc::new(u), MFunc::new(w)).expect("generated dimensions agree")
}

/// The instance for the configured seed (trial 0).
pub fn gen_instance(cfg: &GeneratorConfig) -> Result<WctInstance> {
    cfg.validate()?;
    Ok(gen_trial(cfg, 0))
}

/// Mixed corpus used by the acceptance and closed-form checks: index `i`
/// cycles through generic (two of every four), singleton-block (with and
/// without zeroed points) and normal-family configurations.
pub fn corpus_config(seed: u64, index: u64, n_max: usize) -> GeneratorConfig {
    let base = GeneratorConfig { seed, n_min: 2, n_max, ..GeneratorConfig::default() };
    match index % 4 {
        0 | 1 => base,
        2 if (index / 4) % 2 == 0 => {
            GeneratorConfig { family: Family::Singleton, zero_prob_u: 0.0, zero_prob_w: 0.0, ..base }
        }
        2 => GeneratorConfig { family: Family::Singleton, ..base },
        _ => GeneratorConfig { family: Family::Normal, ..base },
    }
}

/// Instance `index` of the mixed corpus.
pub fn corpus_instance(seed: u64, index: u64, n_max: usize) -> WctInstance {
    gen_trial(&corpus_config(seed, index, n_max), index)
}
