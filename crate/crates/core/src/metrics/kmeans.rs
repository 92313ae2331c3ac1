//! Seeded k-means with k-means++ initialization and deterministic restarts.

use ndarray::{Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

const MAX_LLOYD_ITERS: usize = 300;

/// Restarts used when clustering spectral embeddings; best inertia wins.
pub const DEFAULT_KMEANS_RESTARTS: usize = 20;

#[derive(Debug, Clone)]
pub struct KmeansResult {
    pub labels: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

fn sq_dist(a: ArrayView1<f64>, b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm on the rows of `points`, best of `restarts` runs by
/// (inertia, restart index). Restart `r` draws from a ChaCha stream seeded
/// with `seed + r`, so results are reproducible across platforms.
pub fn kmeans(points: &Array2<f64>, k: usize, seed: u64, restarts: usize) -> Result<KmeansResult> {
    let n = points.nrows();
    if k == 0 {
        return Err(Error::Input("k-means needs k >= 1".into()));
    }
    if k > n {
        return Err(Error::Input(format!(
            "k-means with k = {k} on only {n} points"
        )));
    }
    if !points.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerics(
            "non-finite entries in k-means input".into(),
        ));
    }
    let restarts = restarts.max(1);

    let mut best: Option<KmeansResult> = None;
    for r in 0..restarts {
        let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let outcome = lloyd(points, k, &mut rng);
        let better = match &best {
            None => true,
            Some(b) => outcome.inertia < b.inertia,
        };
        if better {
            best = Some(outcome);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn lloyd(points: &Array2<f64>, k: usize, rng: &mut ChaCha20Rng) -> KmeansResult {
    let n = points.nrows();
    let d = points.ncols();
    let mut centroids = plus_plus_init(points, k, rng);
    let mut labels = vec![usize::MAX; n];

    for _ in 0..MAX_LLOYD_ITERS {
        // assignment step; ties go to the lowest cluster index
        let mut changed = false;
        for i in 0..n {
            let mut best_c = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let dist = sq_dist(points.row(i), centroid);
                if dist < best_d {
                    best_d = dist;
                    best_c = c;
                }
            }
            if labels[i] != best_c {
                labels[i] = best_c;
                changed = true;
            }
        }

        // reseed any empty cluster with the point farthest from its centroid
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for c in 0..k {
            if counts[c] == 0 {
                let mut far_i = 0;
                let mut far_d = f64::NEG_INFINITY;
                for i in 0..n {
                    if counts[labels[i]] <= 1 {
                        continue; // don't empty another cluster
                    }
                    let dist = sq_dist(points.row(i), &centroids[labels[i]]);
                    if dist > far_d {
                        far_d = dist;
                        far_i = i;
                    }
                }
                counts[labels[far_i]] -= 1;
                labels[far_i] = c;
                counts[c] = 1;
                changed = true;
            }
        }

        // update step
        let mut sums = vec![vec![0.0; d]; k];
        for i in 0..n {
            for (j, &x) in points.row(i).iter().enumerate() {
                sums[labels[i]][j] += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for j in 0..d {
                    sums[c][j] /= counts[c] as f64;
                }
                centroids[c] = sums[c].clone();
            }
        }

        if !changed {
            break;
        }
    }

    let inertia = (0..n)
        .map(|i| sq_dist(points.row(i), &centroids[labels[i]]))
        .sum();
    KmeansResult { labels, inertia }
}

/// k-means++ seeding: first center uniform, subsequent centers sampled with
/// probability proportional to the squared distance to the nearest chosen
/// center.
fn plus_plus_init(points: &Array2<f64>, k: usize, rng: &mut ChaCha20Rng) -> Vec<Vec<f64>> {
    let n = points.nrows();
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    centroids.push(points.row(first).to_vec());

    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), &centroids[0]))
        .collect();

    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            // all remaining mass identical to chosen centers
            rng.gen_range(0..n)
        };
        centroids.push(points.row(next).to_vec());
        for i in 0..n {
            let dist = sq_dist(points.row(i), centroids.last().unwrap());
            if dist < d2[i] {
                d2[i] = dist;
            }
        }
    }
    centroids
}
