//! Deterministic parallel sampling and low-discrepancy directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::vector::{norm, Vector};

/// Samples per chunk; each chunk draws from its own stream of the master seed.
pub const CHUNK: usize = 8192;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Run `work(rng, count, acc)` over `samples` split into fixed chunks, in
/// parallel, and merge the chunk accumulators in chunk order.
///
/// The result depends only on `seed`, never on the thread count.
pub fn par_chunks<A, I, W, M>(samples: usize, seed: u64, init: I, work: W, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync,
    W: Fn(&mut ChaCha8Rng, usize, &mut A) + Sync,
    M: Fn(A, A) -> A,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(samples - c * CHUNK);
            let mut rng = stream_rng(seed, c as u64);
            let mut acc = init();
            work(&mut rng, count, &mut acc);
            acc
        })
        .collect();
    parts.into_iter().fold(init(), merge)
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

pub fn uniform_in_box<R: Rng + ?Sized>(rng: &mut R, lo: &[f64], hi: &[f64], out: &mut [f64]) {
    for ((o, a), b) in out.iter_mut().zip(lo).zip(hi) {
        *o = a + (b - a) * rng.random::<f64>();
    }
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut acc = 0.0;
    let mut f = inv;
    while k > 0 {
        acc += (k % base) as f64 * f;
        k /= base;
        f *= inv;
    }
    inv = acc;
    inv
}

/// `n` well-spread unit directions: equal angles in the plane, a Fibonacci
/// lattice on `S^2`, and Gaussianised Halton points above that.
pub fn low_discrepancy_directions(dim: usize, n: usize) -> Vec<Vector> {
    match dim {
        1 => (0..n)
            .map(|k| Vector(vec![if k % 2 == 0 { 1.0 } else { -1.0 }]))
            .collect(),
        2 => (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                Vector(vec![t.cos(), t.sin()])
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let t = golden * k as f64;
                    Vector(vec![r * t.cos(), r * t.sin(), z])
                })
                .collect()
        }
        _ => {
            let normal = Normal::standard();
            (0..n)
                .map(|k| {
                    let g: Vec<f64> = (0..dim)
                        .map(|j| normal.inverse_cdf(radical_inverse(k as u64 + 1, PRIMES[j])))
                        .collect();
                    Vector(g).normalized()
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_sums_are_deterministic() {
        let run = || {
            par_chunks(
                50_000,
                7,
                || 0.0f64,
                |rng, count, acc| {
                    for _ in 0..count {
                        *acc += rng.random::<f64>();
                    }
                },
                |a, b| a + b,
            )
        };
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(run);
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((a / 50_000.0 - 0.5).abs() < 0.01);
    }

    #[test]
    fn halton_directions_are_unit_and_balanced() {
        let dirs = low_discrepancy_directions(4, 4096);
        let mut mean = [0.0; 4];
        for d in &dirs {
            assert!((d.norm() - 1.0).abs() < 1e-12);
            for k in 0..4 {
                mean[k] += d[k] / 4096.0;
            }
        }
        assert!(mean.iter().all(|m| m.abs() < 0.02));
    }

    #[test]
    fn fibonacci_directions_cover_poles() {
        let dirs = low_discrepancy_directions(3, 1000);
        let top = dirs.iter().map(|d| d[2]).fold(f64::MIN, f64::max);
        assert!(top > 0.99);
    }
}
