//! Seeded synthetic embedding spaces for tests and benchmarks.
//!
//! Tokens are `w0..w{n-1}`. All generators are deterministic in their seed.

use crate::embed::EmbeddingSpace;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tokens(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i}")).collect()
}

/// `n` rows of independent uniform [-1, 1) coordinates. Rows are almost
/// surely nonzero; a zero row would be astronomically unlucky but is bumped
/// anyway so constructors never see one.
pub fn random_space(n: usize, dim: usize, seed: u64) -> EmbeddingSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = Vec::with_capacity(n * dim);
    for _ in 0..n {
        let start = matrix.len();
        for _ in 0..dim {
            matrix.push(rng.random_range(-1.0..1.0));
        }
        if matrix[start..].iter().all(|&x| x == 0.0) {
            matrix[start] = 0.5;
        }
    }
    EmbeddingSpace::new(tokens(n), matrix, dim, "synthetic", false).expect("valid synthetic space")
}

/// A space whose first `n_cluster` rows form a tight cone around one
/// direction (norm ≈ 2) and whose remaining `n_noise` rows are uniform
/// noise. Children of the cluster root recover the cluster with high
/// probability at these scales.
pub fn planted_space(n_cluster: usize, n_noise: usize, dim: usize, seed: u64) -> EmbeddingSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = base.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
    for x in base.iter_mut() {
        *x *= 2.0 / norm;
    }
    let n = n_cluster + n_noise;
    let mut matrix = Vec::with_capacity(n * dim);
    for _ in 0..n_cluster {
        let scale = rng.random_range(0.95..1.15);
        for &b in &base {
            matrix.push(b * scale + rng.random_range(-0.05..0.05));
        }
    }
    for _ in 0..n_noise {
        for _ in 0..dim {
            matrix.push(rng.random_range(-1.0..1.0));
        }
    }
    EmbeddingSpace::new(tokens(n), matrix, dim, "synthetic", false).expect("valid synthetic space")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{child_rows, root};

    #[test]
    fn random_space_is_deterministic_and_shaped() {
        let a = random_space(12, 5, 3);
        let b = random_space(12, 5, 3);
        assert_eq!(a.len(), 12);
        assert_eq!(a.dim(), 5);
        assert_eq!(a.token(0), "w0");
        assert_eq!(a.token(11), "w11");
        for i in 0..a.len() {
            assert_eq!(a.row(i), b.row(i));
        }
        let c = random_space(12, 5, 4);
        assert_ne!(a.row(0), c.row(0));
    }

    #[test]
    fn planted_cluster_is_separable_by_its_root() {
        let space = planted_space(10, 50, 12, 77);
        let supports: Vec<&[f64]> = (0..10).map(|i| space.row(i)).collect();
        let alpha = root(&supports).unwrap();
        let kids = child_rows(&space, &alpha).unwrap();
        let in_cluster = kids.iter().filter(|&&i| i < 10).count();
        assert_eq!(in_cluster, 10, "root must admit the whole cluster");
        let spurious = kids.len() - in_cluster;
        assert!(spurious <= 5, "too many noise rows admitted: {spurious}");
    }
}
