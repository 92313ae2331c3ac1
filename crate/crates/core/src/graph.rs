//! Per-view self-expressive graph learning.
//!
//! Each view's similarity graph is the coefficient matrix expressing every
//! sample as a linear combination of the others. Stand-alone it minimizes
//! `|X - XZ|_F^2 + alpha |Z|_F^2`; inside the fusion loop an extra
//! `beta w |Z - S|_F^2` term pulls the graph towards the consensus. Both
//! minimizers are closed forms followed by a projection onto `Z >= 0`.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg;
use crate::types::{ConsensusGraph, ViewGraph};

/// Gram matrix `X^T X` of one view. Constant across solver iterations, so
/// callers compute it once and reuse it.
pub fn gram(x: &Array2<f64>) -> Result<Array2<f64>> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerics("non-finite entries in view matrix".into()));
    }
    Ok(x.t().dot(x))
}

/// Closed-form minimizer of the per-view block before projection:
/// `(X^T X + alpha I + beta_w I)^{-1} (beta_w S + X^T X)`, performed as an
/// SPD solve. `beta_w = 0` with no consensus term gives the stand-alone
/// graph of a single view.
pub fn solve_view_update(
    gram: &Array2<f64>,
    consensus: Option<&Array2<f64>>,
    alpha: f64,
    beta_w: f64,
) -> Result<Array2<f64>> {
    let n = gram.nrows();
    let mut lhs = gram.clone();
    for i in 0..n {
        lhs[[i, i]] += alpha + beta_w;
    }
    let rhs = match consensus {
        Some(s) => {
            if s.nrows() != n || s.ncols() != n {
                return Err(Error::Dimension(format!(
                    "consensus graph is {}x{}, view has {} samples",
                    s.nrows(),
                    s.ncols(),
                    n
                )));
            }
            s * beta_w + gram
        }
        None => gram.clone(),
    };
    linalg::spd_solve(&lhs, &rhs)
}

/// Stand-alone self-expressive graph of a single view:
/// clip(`(X^T X + alpha I)^{-1} X^T X`).
pub fn learn_single_view_graph(
    x: &Array2<f64>,
    alpha: f64,
    view_index: usize,
) -> Result<ViewGraph> {
    if !(alpha > 0.0) {
        return Err(Error::Input("alpha must be strictly positive".into()));
    }
    let g = gram(x)?;
    let raw = solve_view_update(&g, None, alpha, 0.0)?;
    ViewGraph::clipped(raw, view_index)
}

/// Fusion-coupled view-graph update followed by the nonnegativity
/// projection.
pub fn update_view_graph(
    x: &Array2<f64>,
    s: &ConsensusGraph,
    alpha: f64,
    beta: f64,
    w: f64,
    view_index: usize,
) -> Result<ViewGraph> {
    if x.ncols() != s.n() {
        return Err(Error::Dimension(format!(
            "view has {} samples, consensus graph is {}x{}",
            x.ncols(),
            s.n(),
            s.n()
        )));
    }
    let g = gram(x)?;
    let raw = solve_view_update(&g, Some(s.matrix()), alpha, beta * w)?;
    ViewGraph::clipped(raw, view_index)
}

/// Per-view block objective
/// `|X - XZ|_F^2 + alpha |Z|_F^2 + beta w |Z - S|_F^2`.
pub fn view_block_objective(
    x: &Array2<f64>,
    z: &Array2<f64>,
    consensus: Option<&Array2<f64>>,
    alpha: f64,
    beta_w: f64,
) -> f64 {
    let residual = x - &x.dot(z);
    let mut obj =
        residual.iter().map(|v| v * v).sum::<f64>() + alpha * z.iter().map(|v| v * v).sum::<f64>();
    if let Some(s) = consensus {
        obj += beta_w * (z - s).iter().map(|v| v * v).sum::<f64>();
    }
    obj
}

/// Analytic gradient of [`view_block_objective`] with respect to `Z`:
/// `-2 X^T (X - XZ) + 2 alpha Z + 2 beta w (Z - S)`.
pub fn view_block_gradient(
    x: &Array2<f64>,
    z: &Array2<f64>,
    consensus: Option<&Array2<f64>>,
    alpha: f64,
    beta_w: f64,
) -> Array2<f64> {
    let residual = x - &x.dot(z);
    let mut grad = x.t().dot(&residual) * (-2.0) + &(z * (2.0 * alpha));
    if let Some(s) = consensus {
        grad = grad + (z - s) * (2.0 * beta_w);
    }
    grad
}
