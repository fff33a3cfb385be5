use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Binomial;
use rayon::prelude::*;

use super::dataset::{CountDataset, CountRecord, Metadata};
use crate::error::{Error, Result};
use crate::oracle::JointNumberDistribution;

/// Shots drawn from one random substream.
pub const SAMPLING_CHUNK: usize = 65_536;

/// Generator for substream `stream` of `seed`.
pub(crate) fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw `shots` i.i.d. outcomes from `dist` and thin every count with a
/// binomial of success probability `eta`.
pub fn sample_counts(
    dist: &JointNumberDistribution,
    shots: usize,
    eta: f64,
    seed: u64,
) -> Result<CountDataset> {
    if shots == 0 {
        return Err(Error::Config("at least one shot is required".into()));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Config(format!("efficiency must lie in (0, 1], got {eta}")));
    }
    let index = WeightedIndex::new(&dist.probs)
        .map_err(|e| Error::Config(format!("invalid distribution: {e}")))?;
    let d = dist.cutoff + 1;
    let chunks = shots.div_ceil(SAMPLING_CHUNK);
    let records: Vec<CountRecord> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = substream(seed, c as u64);
            let start = c * SAMPLING_CHUNK;
            let end = (start + SAMPLING_CHUNK).min(shots);
            let index = &index;
            (start..end)
                .map(move |k| {
                    let idx = index.sample(&mut rng);
                    let (n1, n2) = ((idx / d) as u64, (idx % d) as u64);
                    CountRecord {
                        shot_id: k as u64,
                        n1: thin(n1, eta, &mut rng),
                        n2: thin(n2, eta, &mut rng),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let metadata = Metadata {
        eta,
        source: "synthetic".into(),
        seed: Some(seed),
    };
    CountDataset::new(records, metadata)
}

fn thin(n: u64, eta: f64, rng: &mut ChaCha8Rng) -> u64 {
    if eta == 1.0 || n == 0 {
        return n;
    }
    Binomial::new(n, eta).expect("valid binomial").sample(rng)
}
