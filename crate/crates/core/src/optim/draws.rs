use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Source of every stochastic decision an optimizer makes.
///
/// Kernels only draw through this trait, which lets tests pin individual random numbers.
pub trait Draws {
    /// Uniform index in `0..n` other than `exclude`. Requires `n >= 2`.
    fn partner(&mut self, exclude: usize, n: usize) -> usize;
    /// Benefit factor, uniform over {1, 2}.
    fn benefit_factor(&mut self) -> f64;
    /// Uniform in `[0, 1)`.
    fn unit(&mut self) -> f64;
    /// Uniform in `[-1, 1)`.
    fn signed_unit(&mut self) -> f64;
    /// Uniform in `[lower, upper)`.
    fn uniform(&mut self, lower: f64, upper: f64) -> f64;
    /// Fair coin.
    fn coin(&mut self) -> bool;
}

/// [`Draws`] backed by a ChaCha8 stream seeded from a `u64`.
#[derive(Debug, Clone)]
pub struct SeededDraws(ChaCha8Rng);

impl SeededDraws {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }
}

impl Draws for SeededDraws {
    fn partner(&mut self, exclude: usize, n: usize) -> usize {
        debug_assert!(n >= 2 && exclude < n);
        // draw from n-1 slots and skip over `exclude`
        let k = self.0.gen_range(0..n - 1);
        if k >= exclude {
            k + 1
        } else {
            k
        }
    }

    fn benefit_factor(&mut self) -> f64 {
        if self.0.gen::<bool>() {
            2.0
        } else {
            1.0
        }
    }

    fn unit(&mut self) -> f64 {
        self.0.gen::<f64>()
    }

    fn signed_unit(&mut self) -> f64 {
        2.0 * self.0.gen::<f64>() - 1.0
    }

    fn uniform(&mut self, lower: f64, upper: f64) -> f64 {
        lower + (upper - lower) * self.0.gen::<f64>()
    }

    fn coin(&mut self) -> bool {
        self.0.gen::<bool>()
    }
}
