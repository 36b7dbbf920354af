//! Reproducible parallel Monte Carlo.
//!
//! Repetitions are split into fixed-size chunks. Chunk `c` of estimate
//! family `f` draws from a ChaCha8 generator seeded with `seed` on stream
//! `f·2³² + c`, so the draws seen by every repetition depend only on
//! `(seed, f, index)` and never on how rayon schedules the chunks. Per-chunk
//! hit counts are reduced in chunk order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Repetitions per generator stream.
pub const CHUNK: usize = 4096;

pub fn chunk_rng(seed: u64, family: u32, chunk: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((family as u64) << 32) | chunk as u64);
    rng
}

/// Number of repetitions for which `trial` returns true.
pub fn count_hits<F>(reps: usize, seed: u64, family: u32, trial: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let chunks = reps.div_ceil(CHUNK);
    let counts: Vec<u64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, family, c as u32);
            let len = CHUNK.min(reps - c * CHUNK);
            (0..len).filter(|_| trial(&mut rng)).count() as u64
        })
        .collect();
    counts.iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub estimate: f64,
    pub se: f64,
    pub reps: usize,
}

impl Proportion {
    pub fn from_hits(hits: u64, reps: usize) -> Self {
        let p = hits as f64 / reps as f64;
        Self { estimate: p, se: (p * (1.0 - p) / reps as f64).sqrt(), reps }
    }

    /// Whether `value` lies within `k` standard errors, with a floor of one
    /// half count so that degenerate estimates (0 or 1) are handled.
    pub fn agrees_with(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.se.max(0.5 / self.reps as f64)
    }
}

pub fn estimate_proportion<F>(reps: usize, seed: u64, family: u32, trial: F) -> Proportion
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    Proportion::from_hits(count_hits(reps, seed, family, trial), reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn reproducible_and_schedule_independent() {
        let f = |r: &mut ChaCha8Rng| r.random::<f64>() < 0.3;
        let a = count_hits(50_000, 11, 0, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| count_hits(50_000, 11, 0, f));
        assert_eq!(a, b);
        assert_ne!(a, count_hits(50_000, 12, 0, f));
        let p = Proportion::from_hits(a, 50_000);
        assert!(p.agrees_with(0.3, 4.0));
    }

    #[test]
    fn streams_differ() {
        let first = |mut r: ChaCha8Rng| r.random::<u64>();
        let a = first(chunk_rng(1, 0, 0));
        assert_ne!(a, first(chunk_rng(1, 0, 1)));
        assert_ne!(a, first(chunk_rng(1, 1, 0)));
        assert_eq!(a, first(chunk_rng(1, 0, 0)));
    }
}
