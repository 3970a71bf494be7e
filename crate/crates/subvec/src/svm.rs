//! Linear binary classifier trained with the Pegasos stochastic subgradient
//! method, used as the comparison baseline for category completion.
//!
//! Training runs on raw embedding vectors. One "epoch" is a full pass over a
//! seeded shuffle of the pooled examples; the step size at global step t is
//! 1/(λt). The bias is trained as a constant-one feature folded into the
//! regularized weight vector: an unregularized bias does not decay with w,
//! so the separating plane would drift as ‖w‖ shrinks between violations.

use crate::error::{Error, Result};
use crate::vector::{dot, Vector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pegasos hyperparameters.
#[derive(Clone, Copy, Debug)]
pub struct SvmHyper {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl SvmHyper {
    pub fn new(seed: u64) -> Self {
        SvmHyper {
            lambda: 1e-4,
            epochs: 20,
            seed,
        }
    }
}

/// A trained linear decision function w·x + b.
#[derive(Clone, Debug)]
pub struct LinearModel {
    pub weights: Vector,
    pub bias: f64,
}

impl LinearModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    /// Positive-class membership. The boundary itself is negative.
    pub fn predict(&self, x: &[f64]) -> bool {
        self.decision(x) > 0.0
    }
}

fn fisher_yates_shuffle(indices: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..indices.len()).rev() {
        let j = rng.random_range(0..=i);
        indices.swap(i, j);
    }
}

/// Trains a linear classifier separating `positives` (label +1) from
/// `negatives` (label −1).
pub fn train_linear_svm(
    positives: &[&[f64]],
    negatives: &[&[f64]],
    hyper: SvmHyper,
) -> Result<LinearModel> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::EmptyClass);
    }
    let dim = positives[0].len();
    for x in positives.iter().chain(negatives.iter()) {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: x.len(),
            });
        }
    }

    let n = positives.len() + negatives.len();
    let example = |i: usize| -> (&[f64], f64) {
        if i < positives.len() {
            (positives[i], 1.0)
        } else {
            (negatives[i - positives.len()], -1.0)
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut t: u64 = 0;

    for _ in 0..hyper.epochs {
        fisher_yates_shuffle(&mut order, &mut rng);
        for &i in &order {
            t += 1;
            let (x, y) = example(i);
            let eta = 1.0 / (hyper.lambda * t as f64);
            let margin = y * (dot(&w, x) + b);
            let decay = 1.0 - eta * hyper.lambda;
            if margin < 1.0 {
                for (wk, xk) in w.iter_mut().zip(x) {
                    *wk = decay * *wk + eta * y * xk;
                }
                b = decay * b + eta * y;
            } else {
                for wk in w.iter_mut() {
                    *wk *= decay;
                }
                b *= decay;
            }
        }
    }

    Ok(LinearModel {
        weights: Vector(w),
        bias: b,
    })
}
