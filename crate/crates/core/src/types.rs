//! Shared value objects for the clustering pipeline.
//!
//! All types here are immutable after construction and safe to share across
//! threads read-only. Algorithmic logic lives in the sibling modules.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multi-view dataset: `t` feature matrices over the same `n` samples.
///
/// Each view is stored features-by-samples (`m_v x n`). Labels, when present,
/// are re-encoded to contiguous 0-based class ids at construction.
#[derive(Debug, Clone)]
pub struct MultiViewDataset {
    views: Vec<Array2<f64>>,
    labels: Option<Vec<usize>>,
    view_names: Option<Vec<String>>,
}

impl MultiViewDataset {
    pub fn new(
        views: Vec<Array2<f64>>,
        labels: Option<Vec<i64>>,
        view_names: Option<Vec<String>>,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(Error::Dataset("a dataset needs at least one view".into()));
        }
        let n = views[0].ncols();
        if n == 0 {
            return Err(Error::Dataset("views contain zero samples".into()));
        }
        for (v, view) in views.iter().enumerate() {
            if view.nrows() == 0 {
                return Err(Error::Dataset(format!("view {v} has no features")));
            }
            if view.ncols() != n {
                return Err(Error::Dataset(format!(
                    "view {v} has {} samples but view 0 has {n}",
                    view.ncols()
                )));
            }
        }
        if let Some(names) = &view_names {
            if names.len() != views.len() {
                return Err(Error::Dataset(format!(
                    "{} view names for {} views",
                    names.len(),
                    views.len()
                )));
            }
        }
        let labels = match labels {
            Some(raw) => {
                if raw.len() != n {
                    return Err(Error::Dataset(format!(
                        "{} labels for {n} samples",
                        raw.len()
                    )));
                }
                Some(encode_labels(&raw))
            }
            None => None,
        };
        Ok(Self {
            views,
            labels,
            view_names,
        })
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.views[0].ncols()
    }

    /// Number of views.
    pub fn t(&self) -> usize {
        self.views.len()
    }

    pub fn views(&self) -> &[Array2<f64>] {
        &self.views
    }

    pub fn view(&self, v: usize) -> &Array2<f64> {
        &self.views[v]
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn view_names(&self) -> Option<&[String]> {
        self.view_names.as_deref()
    }

    /// Number of ground-truth classes, when labels are present.
    pub fn num_classes(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }

    /// Per-feature min-max scaling of every view to `[-1, 1]`; constant
    /// features map to 0. Idempotent on its own output.
    pub fn normalized(&self) -> Result<MultiViewDataset> {
        let views = self
            .views
            .iter()
            .map(normalize_view)
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiViewDataset {
            views,
            labels: self.labels.clone(),
            view_names: self.view_names.clone(),
        })
    }

    /// All views stacked along the feature axis (`sum(m_v) x n`), for
    /// baselines that operate on concatenated features.
    pub fn concatenated(&self) -> Array2<f64> {
        let total: usize = self.views.iter().map(|v| v.nrows()).sum();
        let n = self.n();
        let mut out = Array2::zeros((total, n));
        let mut row = 0;
        for view in &self.views {
            out.slice_mut(ndarray::s![row..row + view.nrows(), ..])
                .assign(view);
            row += view.nrows();
        }
        out
    }
}

/// Re-encodes arbitrary integer labels to contiguous ids `0..k`, ordered by
/// the original label values.
fn encode_labels(raw: &[i64]) -> Vec<usize> {
    let mut distinct: Vec<i64> = raw.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    raw.iter()
        .map(|v| distinct.binary_search(v).expect("label present"))
        .collect()
}

fn normalize_view(view: &Array2<f64>) -> Result<Array2<f64>> {
    if view.is_empty() {
        return Err(Error::Dataset("cannot normalize an empty view".into()));
    }
    let mut out = view.clone();
    for mut feature in out.rows_mut() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in feature.iter() {
            if !x.is_finite() {
                return Err(Error::Numerics("non-finite feature value".into()));
            }
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if hi > lo {
            let span = hi - lo;
            feature.mapv_inplace(|x| 2.0 * (x - lo) / span - 1.0);
        } else {
            feature.fill(0.0);
        }
    }
    Ok(out)
}

/// See [`MultiViewDataset::normalized`].
pub fn normalize_dataset(raw: &MultiViewDataset) -> Result<MultiViewDataset> {
    raw.normalized()
}

/// Nonnegative affinity graph learned for one view.
#[derive(Debug, Clone)]
pub struct ViewGraph {
    matrix: Array2<f64>,
    view_index: usize,
}

impl ViewGraph {
    /// Builds a view graph from a raw coefficient matrix by clipping
    /// negative entries to zero.
    pub fn clipped(raw: Array2<f64>, view_index: usize) -> Result<Self> {
        if raw.nrows() != raw.ncols() {
            return Err(Error::Dimension(format!(
                "view graph must be square, got {}x{}",
                raw.nrows(),
                raw.ncols()
            )));
        }
        let matrix = raw.mapv(|v| v.max(0.0));
        Ok(Self { matrix, view_index })
    }

    /// Wraps an already-nonnegative matrix, rejecting negative or
    /// non-finite entries.
    pub fn new(matrix: Array2<f64>, view_index: usize) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension(format!(
                "view graph must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Input(
                "view graph entries must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { matrix, view_index })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn view_index(&self) -> usize {
        self.view_index
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

/// The fused consensus graph.
///
/// `matrix` is the raw solver output (may contain negative or asymmetric
/// entries because of the spectral term); `symmetrized` is the nonnegative
/// symmetric copy `max((S + S^T)/2, 0)` used for everything spectral.
#[derive(Debug, Clone)]
pub struct ConsensusGraph {
    matrix: Array2<f64>,
    symmetrized: Array2<f64>,
}

impl ConsensusGraph {
    pub fn new(matrix: Array2<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension(format!(
                "consensus graph must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = matrix.nrows();
        let symmetrized = Array2::from_shape_fn((n, n), |(i, j)| {
            (0.5 * (matrix[[i, j]] + matrix[[j, i]])).max(0.0)
        });
        Ok(Self {
            matrix,
            symmetrized,
        })
    }

    /// Raw solver output.
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// Nonnegative symmetric affinity used for Laplacians.
    pub fn symmetrized(&self) -> &Array2<f64> {
        &self.symmetrized
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Strictly positive per-view fusion weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewWeights(Vec<f64>);

impl ViewWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Input("weights vector is empty".into()));
        }
        if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Input(format!(
                "view weights must be finite and strictly positive, got {w:?}"
            )));
        }
        Ok(Self(w))
    }

    /// Uniform weights `1/t`.
    pub fn uniform(t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::Input("weights vector is empty".into()));
        }
        Ok(Self(vec![1.0 / t as f64; t]))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Relaxed cluster-indicator matrix: `n x k` with orthonormal columns.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    f: Array2<f64>,
}

/// Frobenius tolerance on `F^T F - I` accepted at construction.
pub const ORTHONORMALITY_TOL: f64 = 1e-8;

impl SpectralEmbedding {
    pub fn new(f: Array2<f64>) -> Result<Self> {
        let k = f.ncols();
        if k == 0 || f.nrows() < k {
            return Err(Error::Input(format!(
                "embedding must be n x k with 1 <= k <= n, got {}x{k}",
                f.nrows()
            )));
        }
        let gram = f.t().dot(&f);
        let eye = Array2::<f64>::eye(k);
        let dev = crate::linalg::fro_norm(&(&gram - &eye));
        if !dev.is_finite() || dev > ORTHONORMALITY_TOL {
            return Err(Error::Numerics(format!(
                "embedding columns are not orthonormal (|F^T F - I|_F = {dev:.3e})"
            )));
        }
        Ok(Self { f })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.f
    }

    pub fn n(&self) -> usize {
        self.f.nrows()
    }

    pub fn k(&self) -> usize {
        self.f.ncols()
    }

    /// The `n x n` matrix of squared row distances
    /// `p[i][j] = |F_i - F_j|^2`; symmetric with zero diagonal.
    pub fn pairwise_sq_distances(&self) -> Array2<f64> {
        let n = self.n();
        let mut p = Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let d: f64 = self
                    .f
                    .row(i)
                    .iter()
                    .zip(self.f.row(j).iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                p[[i, j]] = d;
                p[[j, i]] = d;
            }
        }
        p
    }
}

/// Regularization and run-control parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub k: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            gamma: 0.1,
            k: 2,
            max_iter: 200,
            tol: 1e-3,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !(self.beta > 0.0) || !(self.gamma > 0.0) {
            return Err(Error::Input(
                "alpha, beta and gamma must be strictly positive".into(),
            ));
        }
        if self.k < 2 {
            return Err(Error::Input("cluster count k must be at least 2".into()));
        }
        if self.max_iter < 1 {
            return Err(Error::Input("max_iter must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Input("tol must be strictly positive".into()));
        }
        Ok(())
    }
}

/// One record per outer iteration of a solver run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    /// Objective value at the end of the iteration.
    pub objective: f64,
    /// `|S_t - S_{t-1}|_F / |S_{t-1}|_F`.
    pub rel_change: f64,
    /// View weights after the iteration's weight update.
    pub weights: Vec<f64>,
    /// Wall time of the iteration in seconds.
    pub wall_secs: f64,
}

/// Connected-component counts of the final consensus graph, by the two
/// independent routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCounts {
    pub spectral: usize,
    pub traversal: usize,
}

/// Convergence history of a solver run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolverTrace {
    pub iterations: Vec<IterationRecord>,
    /// True when the relative-change stopping rule fired before `max_iter`.
    pub converged: bool,
    /// Component counts of the final consensus graph (GFSC only).
    pub components: Option<ComponentCounts>,
    pub warnings: Vec<String>,
}

impl SolverTrace {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    pub fn final_rel_change(&self) -> Option<f64> {
        self.iterations.last().map(|r| r.rel_change)
    }
}

/// Labels plus evaluation metrics (present only when ground truth exists)
/// and the solver trace that produced them.
#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub labels: Vec<usize>,
    pub acc: Option<f64>,
    pub nmi: Option<f64>,
    pub purity: Option<f64>,
    pub trace: SolverTrace,
}
