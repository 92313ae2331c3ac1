//! View weighting and consensus-graph updates.
//!
//! The consensus graph models every per-view graph as a perturbation of
//! itself; views closer to the consensus get larger weights through the
//! inverse-distance scheme `w_v = 1 / (2 |Z^v - S|_F)`.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::fro_norm;
use crate::types::{ConsensusGraph, ViewGraph, ViewWeights};

/// Floor on `|Z^v - S|_F` inside the weight update. The inverse-distance
/// weight is undefined when a view equals the consensus exactly; the floor
/// caps the weight at `1/(2e-8) = 5e7`.
pub const WEIGHT_DISTANCE_FLOOR: f64 = 1e-8;

/// Inverse-distance view weights `w_v = 1 / (2 max(|Z^v - S|_F, floor))`.
///
/// Distances are taken against the raw consensus matrix, the same field the
/// view-graph update sees.
pub fn compute_weights(zs: &[ViewGraph], s: &ConsensusGraph) -> Result<ViewWeights> {
    if zs.is_empty() {
        return Err(Error::Input("no view graphs given".into()));
    }
    let n = s.n();
    let mut w = Vec::with_capacity(zs.len());
    for z in zs {
        if z.n() != n {
            return Err(Error::Dimension(format!(
                "view graph {} is {}x{}, consensus is {n}x{n}",
                z.view_index(),
                z.n(),
                z.n()
            )));
        }
        let dist = fro_norm(&(z.matrix() - s.matrix()));
        if !dist.is_finite() {
            return Err(Error::Numerics(format!(
                "view {} distance to the consensus graph overflowed; the \
                 consensus update has diverged (gamma is too large relative \
                 to beta for this data)",
                z.view_index()
            )));
        }
        w.push(1.0 / (2.0 * dist.max(WEIGHT_DISTANCE_FLOOR)));
    }
    ViewWeights::new(w)
}

/// Consensus update: column `i` of the new `S` is
/// `(sum_v w_v Z^v(:,i) - gamma p_i / (4 beta)) / sum_v w_v`,
/// where `p[i][j] = |F_i - F_j|^2` comes from the current embedding.
/// The symmetrized nonnegative field is refreshed by construction.
pub fn update_consensus(
    zs: &[ViewGraph],
    w: &ViewWeights,
    p: &Array2<f64>,
    beta: f64,
    gamma: f64,
) -> Result<ConsensusGraph> {
    if zs.is_empty() {
        return Err(Error::Input("no view graphs given".into()));
    }
    if zs.len() != w.len() {
        return Err(Error::Dimension(format!(
            "{} view graphs but {} weights",
            zs.len(),
            w.len()
        )));
    }
    let n = zs[0].n();
    if p.nrows() != n || p.ncols() != n {
        return Err(Error::Dimension(format!(
            "pairwise-distance matrix is {}x{}, expected {n}x{n}",
            p.nrows(),
            p.ncols()
        )));
    }
    let w_sum = w.sum();
    let mut s = Array2::<f64>::zeros((n, n));
    for (z, &wv) in zs.iter().zip(w.as_slice()) {
        if z.n() != n {
            return Err(Error::Dimension(format!(
                "view graph {} is {}x{}, expected {n}x{n}",
                z.view_index(),
                z.n(),
                z.n()
            )));
        }
        s.scaled_add(wv, z.matrix());
    }
    // p is symmetric, so subtracting (gamma/(4 beta)) p columnwise equals the
    // whole-matrix expression.
    s.scaled_add(-gamma / (4.0 * beta), p);
    s.mapv_inplace(|v| v / w_sum);
    ConsensusGraph::new(s)
}

/// Plain multi-view averaging baseline: `S = sum_v Z^v / t`.
pub fn average_graph(zs: &[ViewGraph]) -> Result<ConsensusGraph> {
    if zs.is_empty() {
        return Err(Error::Input("no view graphs given".into()));
    }
    let n = zs[0].n();
    let mut s = Array2::<f64>::zeros((n, n));
    for z in zs {
        if z.n() != n {
            return Err(Error::Dimension(format!(
                "view graph {} is {}x{}, expected {n}x{n}",
                z.view_index(),
                z.n(),
                z.n()
            )));
        }
        s += z.matrix();
    }
    s.mapv_inplace(|v| v / zs.len() as f64);
    ConsensusGraph::new(s)
}

/// The consensus block objective solved by [`update_consensus`]:
/// `sum_v beta w_v |Z^v - S|_F^2 + (gamma/2) sum_i p_i^T S(:,i)`.
pub fn consensus_block_objective(
    zs: &[ViewGraph],
    s: &Array2<f64>,
    p: &Array2<f64>,
    beta: f64,
    gamma: f64,
    w: &ViewWeights,
) -> f64 {
    let mut obj = 0.0;
    for (z, &wv) in zs.iter().zip(w.as_slice()) {
        obj += beta * wv * (z.matrix() - s).iter().map(|v| v * v).sum::<f64>();
    }
    obj + 0.5 * gamma * (p * s).sum()
}

/// Gradient of [`consensus_block_objective`] w.r.t. column `i` of `S`:
/// `-2 beta sum_v w_v (Z^v(:,i) - S(:,i)) + (gamma/2) p_i`.
pub fn consensus_column_gradient(
    zs: &[ViewGraph],
    s: &Array2<f64>,
    p: &Array2<f64>,
    beta: f64,
    gamma: f64,
    w: &ViewWeights,
    col: usize,
) -> Vec<f64> {
    let n = s.nrows();
    let mut grad = vec![0.0; n];
    for row in 0..n {
        let mut g = 0.0;
        for (z, &wv) in zs.iter().zip(w.as_slice()) {
            g += -2.0 * beta * wv * (z.matrix()[[row, col]] - s[[row, col]]);
        }
        grad[row] = g + 0.5 * gamma * p[[col, row]];
    }
    grad
}
