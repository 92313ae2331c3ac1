//! Laplacian construction, spectral embeddings, and connected-component
//! counting on the consensus graph.
//!
//! The number of connected components of a nonnegative symmetric graph
//! equals the multiplicity of the zero eigenvalue of its Laplacian, which is
//! what lets an eigenvalue penalty steer the graph towards exactly `k`
//! components.

use ndarray::{Array1, Array2};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg;
use crate::metrics;
use crate::types::{ComponentCounts, ConsensusGraph, SpectralEmbedding};

/// Eigenvalues below `DEFAULT_EIG_TOL * sigma_max` count as zero when
/// counting components spectrally.
pub const DEFAULT_EIG_TOL: f64 = 1e-6;

/// Edges at or below this absolute weight are ignored by the traversal
/// cross-check.
pub const DEFAULT_EDGE_TOL: f64 = 1e-8;

/// Unnormalized graph Laplacian `L = D - W` of the symmetrized consensus
/// graph, with the degree matrix and a lazily computed spectrum.
#[derive(Debug)]
pub struct SpectralQuantities {
    laplacian: Array2<f64>,
    degrees: Array1<f64>,
    eig: OnceLock<(Array1<f64>, Array2<f64>)>,
}

impl Clone for SpectralQuantities {
    fn clone(&self) -> Self {
        Self {
            laplacian: self.laplacian.clone(),
            degrees: self.degrees.clone(),
            eig: OnceLock::new(),
        }
    }
}

impl SpectralQuantities {
    pub fn laplacian(&self) -> &Array2<f64> {
        &self.laplacian
    }

    /// Diagonal of the degree matrix (row sums of the affinity).
    pub fn degrees(&self) -> &Array1<f64> {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.laplacian.nrows()
    }

    fn eig(&self) -> Result<&(Array1<f64>, Array2<f64>)> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let computed = linalg::sym_eigh(&self.laplacian)?;
        let _ = self.eig.set(computed);
        Ok(self.eig.get().expect("just set"))
    }

    /// Eigenvalues of the Laplacian in nondecreasing order, computed on
    /// first use and cached.
    pub fn sigma(&self) -> Result<&Array1<f64>> {
        Ok(&self.eig()?.0)
    }
}

/// Builds `L = D - W` from the symmetrized nonnegative field of the
/// consensus graph.
pub fn build_laplacian(s: &ConsensusGraph) -> SpectralQuantities {
    let w = s.symmetrized();
    let n = w.nrows();
    let degrees: Array1<f64> = w.rows().into_iter().map(|r| r.sum()).collect();
    let mut laplacian = -w.clone();
    for i in 0..n {
        laplacian[[i, i]] += degrees[i];
    }
    SpectralQuantities {
        laplacian,
        degrees,
        eig: OnceLock::new(),
    }
}

/// The embedding update: eigenvectors of `L` for the `k` smallest
/// eigenvalues. By the Ky Fan theorem this minimizes `Tr(F^T L F)` over
/// orthonormal `F`, with minimum equal to the sum of the k smallest
/// eigenvalues.
pub fn update_embedding(q: &SpectralQuantities, k: usize) -> Result<SpectralEmbedding> {
    let n = q.n();
    if k == 0 || k > n {
        return Err(Error::Input(format!(
            "embedding dimension k = {k} out of range for n = {n}"
        )));
    }
    let (_, vectors) = q.eig()?;
    let f = vectors.slice(ndarray::s![.., ..k]).to_owned();
    SpectralEmbedding::new(f)
}

/// `Tr(F^T L F)`.
pub fn laplacian_quadratic(f: &Array2<f64>, l: &Array2<f64>) -> f64 {
    let lf = l.dot(f);
    f.iter().zip(lf.iter()).map(|(a, b)| a * b).sum()
}

/// Component counts of the symmetrized consensus graph by the two
/// independent routes: near-zero Laplacian eigenvalues and graph traversal
/// over edges above `edge_tol`.
pub fn component_counts(
    s: &ConsensusGraph,
    eig_tol: f64,
    edge_tol: f64,
) -> Result<ComponentCounts> {
    let q = build_laplacian(s);
    component_counts_from(&q, s.symmetrized(), eig_tol, edge_tol)
}

/// Same as [`component_counts`] but reuses an existing Laplacian (and its
/// cached spectrum).
pub fn component_counts_from(
    q: &SpectralQuantities,
    w: &Array2<f64>,
    eig_tol: f64,
    edge_tol: f64,
) -> Result<ComponentCounts> {
    let sigma = q.sigma()?;
    let n = sigma.len();
    let sigma_max = sigma[n - 1];
    let spectral = if sigma_max <= 0.0 {
        // zero graph: every vertex is its own component
        n
    } else {
        let thr = eig_tol * sigma_max;
        sigma.iter().filter(|&&v| v <= thr).count()
    };
    let traversal = traversal_components(w, edge_tol);
    if spectral != traversal {
        log::warn!(
            "component count disagreement: spectral {spectral} vs traversal {traversal} \
             (eig_tol {eig_tol:.1e}, edge_tol {edge_tol:.1e})"
        );
    }
    Ok(ComponentCounts {
        spectral,
        traversal,
    })
}

/// Number of connected components (the spectral count; a traversal
/// cross-check logs a warning on disagreement).
pub fn count_components(s: &ConsensusGraph, eig_tol: f64) -> Result<usize> {
    Ok(component_counts(s, eig_tol, DEFAULT_EDGE_TOL)?.spectral)
}

fn traversal_components(w: &Array2<f64>, edge_tol: f64) -> usize {
    let n = w.nrows();
    let mut seen = vec![false; n];
    let mut stack = Vec::new();
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i != j && !seen[j] && w[[i, j]] > edge_tol {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    count
}

/// Rows scaled to unit length; rows with norm below `1e-12` are left as
/// (effectively) zero rows.
pub fn normalize_rows(points: &Array2<f64>) -> Array2<f64> {
    let mut out = points.clone();
    for mut row in out.rows_mut() {
        let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm >= 1e-12 {
            row.mapv_inplace(|v| v / norm);
        }
    }
    out
}

/// Classic spectral clustering on a consensus graph: embed with the k
/// smallest Laplacian eigenvectors, normalize rows to the unit sphere, and
/// cluster the rows with seeded k-means.
pub fn spectral_clustering(s: &ConsensusGraph, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Input("spectral clustering needs k >= 2".into()));
    }
    let q = build_laplacian(s);
    let f = update_embedding(&q, k)?;
    let points = normalize_rows(f.matrix());
    let out = metrics::kmeans(&points, k, seed, metrics::DEFAULT_KMEANS_RESTARTS)?;
    Ok(out.labels)
}
