use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Allowed deviation of a distribution's total from 1.
pub const DISTRIBUTION_TOL: f64 = 1e-9;

/// Sequential uniform draws starting at a given draw index.
///
/// Draw `k` of seed `s` is the `k`-th 64-bit word of the ChaCha8 keystream
/// for `s`, so a stream opened at any index yields exactly the values
/// [`uniform`] gives for those indices. Chunked parallel sampling therefore
/// does not depend on the chunk boundaries.
#[derive(Debug, Clone)]
pub struct DrawStream {
    rng: ChaCha8Rng,
}

impl DrawStream {
    pub fn new(seed: u64, first_draw: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(2 * u128::from(first_draw));
        DrawStream { rng }
    }

    /// Next draw in `[0, 1)` with 53 random bits.
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Uniform draw in `[0, 1)` keyed by `(seed, draw)`.
pub fn uniform(seed: u64, draw: u64) -> f64 {
    DrawStream::new(seed, draw).next_uniform()
}

/// Validated categorical distribution with precomputed cumulative sums.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    cumulative: Vec<f64>,
    last_nonzero: usize,
}

impl OutcomeSampler {
    pub fn new(probabilities: &[f64]) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {p}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        let mut acc = 0.0;
        let cumulative = probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last_nonzero = probabilities
            .iter()
            .rposition(|&p| p > 0.0)
            .expect("positive total");
        Ok(OutcomeSampler {
            cumulative,
            last_nonzero,
        })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn sample(&self, seed: u64, draw: u64) -> usize {
        self.index_of(uniform(seed, draw))
    }

    /// Outcomes for draws `first..first + n`, same as calling
    /// [`sample`](Self::sample) on each.
    pub fn sample_run(&self, seed: u64, first: u64, n: u64) -> impl Iterator<Item = usize> + '_ {
        let mut stream = DrawStream::new(seed, first);
        (0..n).map(move |_| self.index_of(stream.next_uniform()))
    }

    fn index_of(&self, u: f64) -> usize {
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.last_nonzero)
            .min(self.last_nonzero)
    }
}

/// Samples an outcome index from `probabilities`, deterministically in
/// `(seed, draw)`.
pub fn sample_outcome(probabilities: &[f64], seed: u64, draw: u64) -> Result<usize> {
    Ok(OutcomeSampler::new(probabilities)?.sample(seed, draw))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_outcomes() {
        for seed in [0, 1, 42, u64::MAX] {
            for draw in 0..50 {
                assert_eq!(sample_outcome(&[1.0, 0.0], seed, draw).unwrap(), 0);
                assert_eq!(sample_outcome(&[0.0, 1.0], seed, draw).unwrap(), 1);
            }
        }
    }

    #[test]
    fn zero_weight_tail_never_chosen() {
        let s = OutcomeSampler::new(&[0.3, 0.7, 0.0]).unwrap();
        assert!((0..1000).all(|d| s.sample(9, d) < 2));
    }

    #[test]
    fn rejects_bad_distributions() {
        assert!(sample_outcome(&[], 0, 0).is_err());
        assert!(sample_outcome(&[0.5, 0.6], 0, 0).is_err());
        assert!(sample_outcome(&[-0.1, 1.1], 0, 0).is_err());
        assert!(sample_outcome(&[f64::NAN, 1.0], 0, 0).is_err());
        assert!(sample_outcome(&[0.5, 0.5 + 5e-10], 0, 0).is_ok());
    }

    #[test]
    fn fair_coin_frequency() {
        // binomial 3σ band: 3 * sqrt(0.25 / 1e5) ≈ 0.00474
        let s = OutcomeSampler::new(&[0.5, 0.5]).unwrap();
        let zeros = (0..100_000u64).filter(|&d| s.sample(42, d) == 0).count();
        let freq = zeros as f64 / 1e5;
        assert!((freq - 0.5).abs() <= 0.005, "freq {freq}");
    }

    #[test]
    fn keyed_by_seed_and_draw() {
        assert_eq!(uniform(7, 3), uniform(7, 3));
        assert_ne!(uniform(7, 3), uniform(7, 4));
        assert_ne!(uniform(7, 3), uniform(8, 3));
        let u = uniform(123, 456);
        assert!((0.0..1.0).contains(&u));
    }

    #[test]
    fn runs_match_single_draws() {
        let s = OutcomeSampler::new(&[0.2, 0.3, 0.5]).unwrap();
        let run: Vec<usize> = s.sample_run(5, 1000, 64).collect();
        let single: Vec<usize> = (1000..1064).map(|d| s.sample(5, d)).collect();
        assert_eq!(run, single);
        let mut st = DrawStream::new(5, 17);
        st.next_uniform();
        assert_eq!(st.next_uniform(), uniform(5, 18));
    }
}
