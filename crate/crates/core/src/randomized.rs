//! Sampled family constructions and random instance generation.
//!
//! Instead of the exact builder, a family can be drawn at random: each
//! string is sampled position by position from the sequence's
//! distributions, and its property bounds are truncated to the longest
//! prefix meeting the mode's probability threshold. With enough samples
//! the family answers queries correctly with high probability, and the
//! truncation makes positive answers trustworthy unconditionally.
//!
//! Every string gets its own generator stream derived from the seed, so
//! results are reproducible bit for bit no matter how the sampling loop is
//! scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::approx::ApproxIndex;
use crate::error::{Error, Result};
use crate::index::WeightedIndex;
use crate::property::PropertyArray;
use crate::seq::{Threshold, WeightedSequence};
use crate::zest::ZEstimation;

/// Parameters of the sampled constructions.
#[derive(Debug, Clone, Copy)]
pub struct RandomizedConfig {
    seed: u64,
    c: u32,
}

impl RandomizedConfig {
    /// `c` steers the failure probability (roughly `(nz)^{-c}`); must be
    /// at least 1.
    pub fn new(seed: u64, c: u32) -> Result<RandomizedConfig> {
        if c < 1 {
            return Err(Error::validation("confidence constant must be ≥ 1"));
        }
        Ok(RandomizedConfig { seed, c })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn confidence(&self) -> u32 {
        self.c
    }
}

/// Which guarantee a sampled family was built for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleMode {
    /// Occurrence counts match the exact family with high probability;
    /// positive counts are always sound.
    ExactThreshold { z: f64 },
    /// Count/k estimates occurrence probabilities within ±eps.
    Approximate { eps: f64 },
}

/// A family of independently sampled strings with truncated properties.
pub struct SampledFamily {
    family: ZEstimation,
    mode: SampleMode,
}

impl SampledFamily {
    pub fn family(&self) -> &ZEstimation {
        &self.family
    }

    pub fn mode(&self) -> SampleMode {
        self.mode
    }

    pub fn size(&self) -> usize {
        self.family.size()
    }
}

/// Number of samples for the exact-threshold mode: `⌈(c+2)·z·ln(nz)⌉`.
pub fn exact_sample_count(n: usize, z: f64, c: u32) -> usize {
    ((c as f64 + 2.0) * z * (n as f64 * z).ln()).ceil() as usize
}

/// Number of samples for the approximate mode: `⌈(c+2)·ε⁻²·ln(n/ε)⌉`.
pub fn approx_sample_count(n: usize, eps: f64, c: u32) -> usize {
    ((c as f64 + 2.0) / (eps * eps) * (n as f64 / eps).ln()).ceil() as usize
}

/// Draws one string from the sequence's per-position distributions.
pub fn sample_string(x: &WeightedSequence, rng: &mut impl Rng) -> Vec<u8> {
    let sigma = x.alphabet().size() as u8;
    (1..=x.len())
        .map(|i| {
            let u: f64 = rng.gen();
            let mut cum = 0.0f64;
            let mut last_positive = 0u8;
            for c in 0..sigma {
                let p = x.prob(i, c);
                if p > 0.0 {
                    last_positive = c;
                    cum += p;
                    if u < cum {
                        return c;
                    }
                }
            }
            last_positive
        })
        .collect()
}

/// Longest property bounds for `s`: at each position, the longest prefix
/// whose occurrence probability still meets `z`.
fn truncated_property(x: &WeightedSequence, s: &[u8], z: f64) -> PropertyArray {
    let n = s.len();
    let mut ends = Vec::with_capacity(n);
    for i in 1..=n {
        let mut log2 = 0.0f64;
        let mut end = i - 1;
        for t in i..=n {
            let next = log2 + x.log2_prob(t, s[t - 1]);
            if !crate::prob::Prob::from_log2(next).meets(z) {
                break;
            }
            log2 = next;
            end = t;
        }
        ends.push(end);
    }
    PropertyArray::new(ends, n).expect("truncated bounds are monotone")
}

fn sample_family(x: &WeightedSequence, k: usize, threshold_z: f64, cfg: RandomizedConfig) -> ZEstimation {
    let n = x.len();
    let mut strings = Vec::with_capacity(k);
    let mut props = Vec::with_capacity(k);
    for j in 0..k {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(j as u64);
        let s = sample_string(x, &mut rng);
        props.push(truncated_property(x, &s, threshold_z));
        strings.push(s);
    }
    ZEstimation::new(strings, props, n).expect("sampled strings have uniform length")
}

/// Samples a family that reproduces exact-threshold occurrence sets with
/// probability ≥ 1 − (nz)^−c; a positive count always implies a true
/// occurrence.
pub fn build_randomized_family(
    x: &WeightedSequence,
    z: Threshold,
    cfg: RandomizedConfig,
) -> SampledFamily {
    let k = exact_sample_count(x.len(), z.z(), cfg.confidence());
    SampledFamily {
        family: sample_family(x, k, z.z(), cfg),
        mode: SampleMode::ExactThreshold { z: z.z() },
    }
}

/// Samples a family whose relative counts estimate occurrence
/// probabilities within ±eps, with probability ≥ 1 − (eps/n)^c.
pub fn build_randomized_approx_family(
    x: &WeightedSequence,
    eps: f64,
    cfg: RandomizedConfig,
) -> Result<SampledFamily> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::validation(format!(
            "accuracy must lie in (0, 1], got {eps}"
        )));
    }
    let k = approx_sample_count(x.len(), eps, cfg.confidence());
    Ok(SampledFamily {
        family: sample_family(x, k, 1.0 / eps, cfg),
        mode: SampleMode::Approximate { eps },
    })
}

/// Sampled counterpart of the exact index build.
pub fn build_randomized_index(
    x: &WeightedSequence,
    z: Threshold,
    cfg: RandomizedConfig,
) -> Result<WeightedIndex> {
    let fam = build_randomized_family(x, z, cfg);
    WeightedIndex::from_family(x.alphabet().clone(), fam.family(), z.z())
}

/// Sampled counterpart of the approximate index build.
pub fn build_randomized_approx_index(
    x: &WeightedSequence,
    eps: f64,
    cfg: RandomizedConfig,
) -> Result<ApproxIndex> {
    let fam = build_randomized_approx_family(x, eps, cfg)?;
    ApproxIndex::from_family(x.alphabet().clone(), fam.family(), eps)
}

/// Generates a random weighted sequence with density-1 Dirichlet rows
/// (normalized exponentials).
pub fn random_weighted_sequence(
    alphabet: &Alphabet,
    n: usize,
    rng: &mut impl Rng,
) -> Result<WeightedSequence> {
    if n == 0 {
        return Err(Error::validation("sequence length must be positive"));
    }
    let sigma = alphabet.size();
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        loop {
            let raw: Vec<f64> = (0..sigma)
                .map(|_| {
                    let u: f64 = rng.gen();
                    -(1.0 - u).ln()
                })
                .collect();
            let sum: f64 = raw.iter().sum();
            if sum > 1e-12 {
                rows.push(raw.iter().map(|e| e / sum).collect::<Vec<f64>>());
                break;
            }
        }
    }
    WeightedSequence::from_rows(alphabet.clone(), &rows)
}
