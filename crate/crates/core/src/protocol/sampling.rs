//! Seeded shot sampling from an exact click distribution.
//!
//! Shot `k` lives in chunk `k / SHOT_CHUNK` and is drawn from a ChaCha8
//! stream keyed by `(seed, chunk)`, so results do not depend on how chunks
//! are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::herald::{ClickDistribution, ClickPattern};
use crate::error::{Error, Result};

/// Shots per independent random stream.
pub const SHOT_CHUNK: u64 = 4096;

/// Inverse-CDF sampler over the patterns of a distribution.
#[derive(Clone, Debug)]
pub struct Sampler {
    patterns: Vec<ClickPattern>,
    cdf: Vec<f64>,
    last_nonzero: usize,
}

impl Sampler {
    pub fn new(dist: &ClickDistribution) -> Result<Self> {
        let mut acc = 0.0;
        let mut cdf = Vec::with_capacity(dist.results.len());
        let mut last_nonzero = None;
        for (i, r) in dist.results.iter().enumerate() {
            if r.probability < 0.0 || !r.probability.is_finite() {
                return Err(Error::NonFinite("pattern probability"));
            }
            acc += r.probability;
            cdf.push(acc);
            if r.probability > 0.0 {
                last_nonzero = Some(i);
            }
        }
        let last_nonzero = last_nonzero.ok_or(Error::ProbabilityLeak { sum: acc })?;
        Ok(Sampler {
            patterns: dist.results.iter().map(|r| r.pattern).collect(),
            cdf,
            last_nonzero,
        })
    }

    pub fn patterns(&self) -> &[ClickPattern] {
        &self.patterns
    }

    /// Index of the pattern for a uniform draw `u ∈ [0, 1)`.
    pub fn index_for(&self, u: f64) -> usize {
        let i = self.cdf.partition_point(|&c| c <= u);
        i.min(self.last_nonzero)
    }

    /// Draws one pattern index from `rng`.
    pub fn sample_shot<R: Rng>(&self, rng: &mut R) -> usize {
        self.index_for(rng.random::<f64>())
    }
}

/// Outcome of one shot: the pattern index, or `None` when an atom was missed.
pub type Shot = Option<usize>;

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn draw_chunk(sampler: &Sampler, seed: u64, chunk: u64, len: u64, efficiency: f64) -> Vec<Shot> {
    let mut rng = chunk_rng(seed, chunk);
    (0..len)
        .map(|_| {
            let idx = sampler.sample_shot(&mut rng);
            if efficiency < 1.0 {
                let d1 = rng.random::<f64>() < efficiency;
                let d2 = rng.random::<f64>() < efficiency;
                (d1 && d2).then_some(idx)
            } else {
                Some(idx)
            }
        })
        .collect()
}

fn check_efficiency(efficiency: f64) -> Result<()> {
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(Error::param(
            "detection_efficiency",
            format!("must lie in (0, 1], got {efficiency}"),
        ));
    }
    Ok(())
}

fn chunks(shots: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let n = shots.div_ceil(SHOT_CHUNK);
    (0..n).into_par_iter().map(move |c| (c, SHOT_CHUNK.min(shots - c * SHOT_CHUNK)))
}

/// The full ordered shot sequence.
pub fn shot_sequence(sampler: &Sampler, shots: u64, seed: u64, efficiency: f64) -> Result<Vec<Shot>> {
    check_efficiency(efficiency)?;
    let parts: Vec<Vec<Shot>> = chunks(shots)
        .map(|(c, len)| draw_chunk(sampler, seed, c, len, efficiency))
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotCounts {
    /// Counts per pattern, in the sampler's pattern order.
    pub counts: Vec<u64>,
    pub discarded: u64,
}

impl ShotCounts {
    pub fn detected(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Pattern counts for `shots` shots, without materializing the sequence.
pub fn sample_shots(sampler: &Sampler, shots: u64, seed: u64, efficiency: f64) -> Result<ShotCounts> {
    check_efficiency(efficiency)?;
    let n = sampler.patterns().len();
    let partials: Vec<ShotCounts> = chunks(shots)
        .map(|(c, len)| {
            let mut counts = vec![0u64; n];
            let mut discarded = 0;
            for shot in draw_chunk(sampler, seed, c, len, efficiency) {
                match shot {
                    Some(i) => counts[i] += 1,
                    None => discarded += 1,
                }
            }
            ShotCounts { counts, discarded }
        })
        .collect();
    let mut total = ShotCounts { counts: vec![0; n], discarded: 0 };
    for part in partials {
        for (t, c) in total.counts.iter_mut().zip(part.counts) {
            *t += c;
        }
        total.discarded += part.discarded;
    }
    Ok(total)
}
