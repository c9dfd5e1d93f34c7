//! Deterministic chunked Monte-Carlo driver.
//!
//! Samples are drawn in fixed-size chunks; chunk `i` uses the substream
//! `(seed, i)`, partial sums are collected per chunk and combined in chunk
//! order. The result is therefore bit-identical for a fixed
//! `(seed, n_samples, chunk_size)` triple no matter how many worker threads
//! rayon schedules.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const DEFAULT_CHUNK: usize = 1 << 16;

/// Sample mean and standard error of a scalar statistic.
#[derive(Clone, Copy, Debug)]
pub struct McMean {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Mean of `draw(rng)` over `n_samples` draws.
pub fn sample_mean<F>(n_samples: usize, seed: u64, chunk_size: usize, draw: F) -> McMean
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunk_size = chunk_size.max(1);
    let n_chunks = n_samples.div_ceil(chunk_size);
    let partials: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = crate::rng::substream(seed, c as u64);
            let lo = c * chunk_size;
            let hi = ((c + 1) * chunk_size).min(n_samples);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in lo..hi {
                let x = draw(&mut rng);
                sum += x;
                sumsq += x * x;
            }
            (sum, sumsq)
        })
        .collect();

    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for (s, s2) in partials {
        sum += s;
        sumsq += s2;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0);
    McMean {
        mean,
        std_error: (var / n).sqrt(),
        n: n_samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn mean_of_uniform() {
        let m = sample_mean(200_000, 5, DEFAULT_CHUNK, |rng| rng.random::<f64>());
        assert!((m.mean - 0.5).abs() < 4.0 * m.std_error);
        // σ of U(0,1) is 1/√12 ≈ 0.2887
        assert!((m.std_error - 0.2887 / (200_000f64).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn bit_identical_across_thread_counts() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| sample_mean(100_000, 12, 1 << 12, |rng| rng.random::<f64>()))
        };
        let a = run(1);
        let b = run(4);
        let c = run(8);
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(b.mean.to_bits(), c.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), c.std_error.to_bits());
    }
}
