use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::tensor::Tensor;

/// Deterministic parameter initializer: uniform(-a, a) with
/// `a = sqrt(6 / (fan_in + fan_out))`, drawn from a counter-based stream so
/// the same seed always produces the same parameters.
pub struct ParamInit {
    rng: ChaCha8Rng,
}

impl ParamInit {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Weight matrix with fan-in `rows` and fan-out `cols`.
    pub fn glorot(&mut self, rows: usize, cols: usize) -> Tensor {
        let a = (6.0 / (rows + cols) as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| self.rng.random_range(-a..a))
            .collect();
        Tensor::from_vec(rows, cols, data)
    }

    pub fn zeros(&mut self, rows: usize, cols: usize) -> Tensor {
        Tensor::zeros(rows, cols)
    }
}
