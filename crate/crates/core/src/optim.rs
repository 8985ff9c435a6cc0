//! Training settings and the AdaGrad update shared by both trainers.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub l2: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2: 0.1,
            epochs: 50,
            learning_rate: 0.1,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub(crate) fn is_valid(&self) -> bool {
        self.l2.is_finite()
            && self.l2 >= 0.0
            && self.learning_rate.is_finite()
            && self.learning_rate > 0.0
    }
}

const ADAGRAD_EPS: f64 = 1e-8;

/// Per-coordinate AdaGrad state.
#[derive(Debug, Clone)]
pub(crate) struct AdaGrad {
    learning_rate: f64,
    sum_sq: Vec<f64>,
}

impl AdaGrad {
    pub(crate) fn new(learning_rate: f64, dim: usize) -> AdaGrad {
        AdaGrad {
            learning_rate,
            sum_sq: vec![0.0; dim],
        }
    }

    #[inline]
    pub(crate) fn step(&mut self, i: usize, weight: &mut f64, grad: f64) {
        if grad == 0.0 {
            return;
        }
        let acc = &mut self.sum_sq[i];
        *acc += grad * grad;
        *weight -= self.learning_rate * grad / (acc.sqrt() + ADAGRAD_EPS);
    }
}

/// Deterministic per-epoch visiting orders.
pub(crate) struct EpochOrder {
    rng: ChaCha8Rng,
    order: Vec<usize>,
}

impl EpochOrder {
    pub(crate) fn new(seed: u64, len: usize) -> EpochOrder {
        EpochOrder {
            rng: ChaCha8Rng::seed_from_u64(seed),
            order: (0..len).collect(),
        }
    }

    pub(crate) fn next_epoch(&mut self) -> &[usize] {
        self.order.shuffle(&mut self.rng);
        &self.order
    }
}

/// Number of training items each feature occurs in, used to spread the L2
/// penalty of a feature over the updates that touch it.
pub(crate) fn document_frequency<'a, I>(num_features: usize, active_sets: I) -> Vec<usize>
where
    I: IntoIterator<Item = &'a [usize]>,
{
    let mut df = vec![0; num_features];
    for set in active_sets {
        for &f in set {
            df[f] += 1;
        }
    }
    df
}
