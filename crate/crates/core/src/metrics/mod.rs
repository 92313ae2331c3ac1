//! Clustering evaluation: accuracy under optimal cluster-class matching,
//! normalized mutual information, and purity, plus the k-means
//! sub-clusterer used on spectral embeddings.

mod hungarian;
mod kmeans;

pub use hungarian::{max_sum_assignment, min_cost_assignment};
pub use kmeans::{kmeans, KmeansResult, DEFAULT_KMEANS_RESTARTS};

use ndarray::Array2;

use crate::error::{Error, Result};

fn check_lengths(pred: &[usize], truth: &[usize]) -> Result<usize> {
    if pred.len() != truth.len() {
        return Err(Error::Metric(format!(
            "label vectors differ in length: {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Metric("empty label vectors".into()));
    }
    Ok(pred.len())
}

/// Contingency counts `c[i][j] = |cluster i ∩ class j|`.
fn contingency(pred: &[usize], truth: &[usize]) -> Array2<f64> {
    let kp = pred.iter().copied().max().unwrap_or(0) + 1;
    let kt = truth.iter().copied().max().unwrap_or(0) + 1;
    let mut c = Array2::zeros((kp, kt));
    for (&p, &t) in pred.iter().zip(truth.iter()) {
        c[[p, t]] += 1.0;
    }
    c
}

/// Clustering accuracy: the best one-to-one matching between clusters and
/// classes, found by optimal assignment on the contingency matrix (padded
/// square with zeros when cluster and class counts differ).
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let n = check_lengths(pred, truth)?;
    let c = contingency(pred, truth);
    let side = c.nrows().max(c.ncols());
    let mut padded = Array2::zeros((side, side));
    padded
        .slice_mut(ndarray::s![..c.nrows(), ..c.ncols()])
        .assign(&c);
    let (_, matched) = max_sum_assignment(&padded);
    Ok(matched / n as f64)
}

fn entropy(counts: &[f64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information `I(pred, truth) / sqrt(H(pred) H(truth))`
/// with natural-log entropies.
///
/// Degenerate conventions: 1 when both partitions are single-cluster, 0 when
/// exactly one has zero entropy.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let n = check_lengths(pred, truth)? as f64;
    let c = contingency(pred, truth);
    let row_sums: Vec<f64> = c.rows().into_iter().map(|r| r.sum()).collect();
    let col_sums: Vec<f64> = c.columns().into_iter().map(|col| col.sum()).collect();
    let h_pred = entropy(&row_sums, n);
    let h_truth = entropy(&col_sums, n);

    if h_pred == 0.0 && h_truth == 0.0 {
        return Ok(1.0);
    }
    if h_pred == 0.0 || h_truth == 0.0 {
        return Ok(0.0);
    }

    let mut mi = 0.0;
    for i in 0..c.nrows() {
        for j in 0..c.ncols() {
            let nij = c[[i, j]];
            if nij > 0.0 {
                let pij = nij / n;
                mi += pij * ((n * nij) / (row_sums[i] * col_sums[j])).ln();
            }
        }
    }
    Ok((mi / (h_pred * h_truth).sqrt()).clamp(0.0, 1.0))
}

/// Purity: fraction of points falling in their cluster's majority class.
pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let n = check_lengths(pred, truth)?;
    let c = contingency(pred, truth);
    let correct: f64 = c
        .rows()
        .into_iter()
        .map(|row| row.fold(0.0_f64, |a, &b| a.max(b)))
        .sum();
    Ok(correct / n as f64)
}
