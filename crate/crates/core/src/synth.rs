//! Planted-partition generator used as a correctness oracle.
//!
//! Samples live in `k` balanced Gaussian clusters. Every view sees the same
//! cluster geometry through its own random rotation (plus a per-view
//! dimension), so views are genuinely heterogeneous while sharing the
//! planted structure. With `noise = 0` samples coincide with their cluster
//! centers exactly.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::types::MultiViewDataset;

/// Generates `n` samples over `t` views with `k` planted clusters.
///
/// Cluster sizes are balanced (they differ by at most one when `k` does not
/// divide `n`); labels are the planted assignment. Deterministic in `seed`.
pub fn generate_synthetic(
    n: usize,
    t: usize,
    k: usize,
    noise: f64,
    seed: u64,
) -> Result<MultiViewDataset> {
    if k == 0 || t == 0 {
        return Err(Error::Input(
            "need at least one view and one cluster".into(),
        ));
    }
    if n < 2 * k {
        return Err(Error::Input(format!(
            "need at least two samples per cluster: n = {n}, k = {k}"
        )));
    }
    if !(noise >= 0.0) {
        return Err(Error::Input("noise must be nonnegative".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    // balanced block labels: sizes differ by at most one
    let base = n / k;
    let extra = n % k;
    let mut labels = Vec::with_capacity(n);
    for c in 0..k {
        let size = base + usize::from(c < extra);
        labels.extend(std::iter::repeat_n(c, size));
    }

    // latent cluster centers, scaled for clear separation
    let latent_dim = 2 * k;
    let centers = Array2::from_shape_fn((latent_dim, k), |_| {
        3.0 * rng.sample::<f64, _>(StandardNormal)
    });

    let mut views = Vec::with_capacity(t);
    for v in 0..t {
        let dim = latent_dim + v;
        let rotation = random_rotation(dim, latent_dim, &mut rng);
        let rotated = rotation.dot(&centers); // dim x k
        let mut x = Array2::zeros((dim, n));
        for (j, &label) in labels.iter().enumerate() {
            for i in 0..dim {
                x[[i, j]] = rotated[[i, label]] + noise * rng.sample::<f64, _>(StandardNormal);
            }
        }
        views.push(x);
    }

    let labels_i64: Vec<i64> = labels.iter().map(|&l| l as i64).collect();
    MultiViewDataset::new(views, Some(labels_i64), None)
}

/// Random matrix with orthonormal columns (`rows x cols`, `cols <= rows`),
/// from Gram-Schmidt on a Gaussian draw.
fn random_rotation(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Array2<f64> {
    let mut q = Array2::from_shape_fn((rows, cols), |_| rng.sample::<f64, _>(StandardNormal));
    for j in 0..cols {
        for _ in 0..2 {
            for i in 0..j {
                let proj: f64 = (0..rows).map(|r| q[[r, i]] * q[[r, j]]).sum();
                for r in 0..rows {
                    q[[r, j]] -= proj * q[[r, i]];
                }
            }
        }
        let norm: f64 = (0..rows).map(|r| q[[r, j]] * q[[r, j]]).sum::<f64>().sqrt();
        for r in 0..rows {
            q[[r, j]] /= norm;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_clusters() {
        let d = generate_synthetic(6, 1, 3, 0.0, 0).unwrap();
        let labels = d.labels().unwrap();
        for c in 0..3 {
            assert_eq!(labels.iter().filter(|&&l| l == c).count(), 2);
        }
    }

    #[test]
    fn uneven_split_differs_by_at_most_one() {
        let d = generate_synthetic(10, 1, 3, 0.0, 0).unwrap();
        let labels = d.labels().unwrap();
        let counts: Vec<usize> = (0..3)
            .map(|c| labels.iter().filter(|&&l| l == c).count())
            .collect();
        assert_eq!(counts.iter().sum::<usize>(), 10);
        assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate_synthetic(12, 2, 3, 0.5, 42).unwrap();
        let b = generate_synthetic(12, 2, 3, 0.5, 42).unwrap();
        for (va, vb) in a.views().iter().zip(b.views().iter()) {
            assert_eq!(va, vb);
        }
        assert_eq!(a.labels(), b.labels());
    }

    #[test]
    fn zero_noise_collapses_clusters_to_points() {
        let d = generate_synthetic(9, 2, 3, 0.0, 7).unwrap();
        let labels = d.labels().unwrap();
        for view in d.views() {
            for (j1, &l1) in labels.iter().enumerate() {
                for (j2, &l2) in labels.iter().enumerate() {
                    if l1 == l2 {
                        for i in 0..view.nrows() {
                            assert_eq!(view[[i, j1]], view[[i, j2]]);
                        }
                    } else {
                        let same = (0..view.nrows()).all(|i| view[[i, j1]] == view[[i, j2]]);
                        assert!(!same, "samples {j1} and {j2} collide across clusters");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_too_few_samples() {
        assert!(generate_synthetic(5, 1, 3, 0.0, 0).is_err());
    }
}
