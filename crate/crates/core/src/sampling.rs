//! Seeded complex Gaussian sampling.
//!
//! Uniforms come from ChaCha8 seeded with a 64-bit integer; normals from the
//! Box–Muller transform. Independent partitions (restarts, batches) use the
//! same key on distinct ChaCha streams, so their draws depend only on
//! `(seed, partition)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{c64, ComplexMatrix};

/// Recorded in every certificate that draws random inputs.
pub const GENERATOR: &str = "chacha8(seed_from_u64)+box-muller; complex normal with E|z|^2=1";

#[derive(Clone, Debug)]
pub struct GaussianSampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Sampler for partition `index` of a run seeded with `seed`.
    pub fn partition(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index + 1);
        Self { rng, spare: None }
    }

    /// Uniform in the open interval (0, 1).
    fn open_uniform(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.gen();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Real standard normal N(0, 1).
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.open_uniform();
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Complex standard normal: real and imaginary parts i.i.d. N(0, 1/2).
    pub fn complex_normal(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let re = self.standard_normal();
        let im = self.standard_normal();
        c64(re * s, im * s)
    }

    pub fn complex_vector(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex_normal()).collect()
    }

    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = GaussianSampler::new(42).complex_vector(16);
        let b = GaussianSampler::new(42).complex_vector(16);
        assert_eq!(a, b);
        let c = GaussianSampler::new(43).complex_vector(16);
        assert_ne!(a, c);
    }

    #[test]
    fn partitions_are_distinct_and_reproducible() {
        let p0 = GaussianSampler::partition(7, 0).complex_vector(8);
        let p1 = GaussianSampler::partition(7, 1).complex_vector(8);
        assert_ne!(p0, p1);
        assert_eq!(p1, GaussianSampler::partition(7, 1).complex_vector(8));
    }

    #[test]
    fn moments_are_plausible() {
        let mut s = GaussianSampler::new(5);
        let n = 20_000;
        let zs: Vec<_> = (0..n).map(|_| s.complex_normal()).collect();
        let mean: Complex64 = zs.iter().sum::<Complex64>() / n as f64;
        let power = zs.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!(mean.norm() < 0.03);
        assert!((power - 1.0).abs() < 0.03);
    }
}
