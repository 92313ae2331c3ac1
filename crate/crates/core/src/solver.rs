//! Alternating solvers: the full structured model (`gfsc`) and the
//! fusion-only variant (`gf`).
//!
//! One outer iteration of `gfsc` performs, in order: the per-view graph
//! updates, the nonnegativity projection, the consensus update, the
//! embedding update, and the weight update. The loop stops when the
//! relative change of the consensus graph drops below `tol` or after
//! `max_iter` iterations.

use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fusion;
use crate::graph;
use crate::linalg::fro_norm;
use crate::metrics;
use crate::spectral;
use crate::types::{
    ClusteringResult, ConsensusGraph, Hyperparams, IterationRecord, MultiViewDataset, SolverTrace,
    SpectralEmbedding, ViewGraph, ViewWeights,
};

/// How the consensus graph and embedding are seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitStrategy {
    /// Random `S` and `F` (uniform graph, orthonormalized Gaussian
    /// embedding).
    #[default]
    Random,
    /// Average of the stand-alone per-view graphs, with the embedding taken
    /// from its Laplacian.
    WarmStart,
}

/// Knobs that are not part of the model itself.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub init: InitStrategy,
    /// Normalize embedding rows to unit length before the final k-means.
    /// Off by default: the structured model clusters raw indicator rows.
    pub normalize_embedding_rows: bool,
    pub kmeans_restarts: usize,
    /// Verify per-iteration that each block update does not increase its
    /// block objective. Violations are recorded as trace warnings and abort
    /// debug builds.
    pub monotone_checks: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            init: InitStrategy::Random,
            normalize_embedding_rows: false,
            kmeans_restarts: metrics::DEFAULT_KMEANS_RESTARTS,
            monotone_checks: cfg!(debug_assertions),
        }
    }
}

/// Full block state of the alternating solvers.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub zs: Vec<ViewGraph>,
    pub s: ConsensusGraph,
    pub f: SpectralEmbedding,
    pub w: ViewWeights,
}

/// Value of the unified objective
/// `sum_v { |X^v - X^v Z^v|_F^2 + alpha |Z^v|_F^2 + beta w_v |Z^v - S|_F^2 }
///  + gamma Tr(F^T L F)`,
/// with `L` built from the symmetrized nonnegative consensus field.
pub fn objective(
    zs: &[ViewGraph],
    s: &ConsensusGraph,
    f: &SpectralEmbedding,
    data: &MultiViewDataset,
    params: &Hyperparams,
    w: &ViewWeights,
) -> f64 {
    let q = spectral::build_laplacian(s);
    fusion_objective(zs, s, data, params.alpha, params.beta, w)
        + params.gamma * spectral::laplacian_quadratic(f.matrix(), q.laplacian())
}

/// The fusion-only part of the objective (no spectral term).
pub fn fusion_objective(
    zs: &[ViewGraph],
    s: &ConsensusGraph,
    data: &MultiViewDataset,
    alpha: f64,
    beta: f64,
    w: &ViewWeights,
) -> f64 {
    zs.iter()
        .zip(data.views())
        .zip(w.as_slice())
        .map(|((z, x), &wv)| {
            graph::view_block_objective(x, z.matrix(), Some(s.matrix()), alpha, beta * wv)
        })
        .sum()
}

/// Solver initialization: uniform weights `1/t`, seeded random `S` and
/// orthonormalized `F`, and the first pass of view-graph updates against
/// that `S`.
pub fn initialize(data: &MultiViewDataset, params: &Hyperparams) -> Result<SolverState> {
    let grams = compute_grams(data)?;
    initialize_with(data, &grams, params, InitStrategy::Random)
}

fn compute_grams(data: &MultiViewDataset) -> Result<Vec<Array2<f64>>> {
    data.views().iter().map(graph::gram).collect()
}

fn initialize_with(
    data: &MultiViewDataset,
    grams: &[Array2<f64>],
    params: &Hyperparams,
    strategy: InitStrategy,
) -> Result<SolverState> {
    params.validate()?;
    let n = data.n();
    if params.k > n {
        return Err(Error::Input(format!(
            "k = {} exceeds the sample count {n}",
            params.k
        )));
    }
    let w = ViewWeights::uniform(data.t())?;
    let (s, f) = match strategy {
        InitStrategy::Random => {
            let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
            let s_init = Array2::from_shape_fn((n, n), |_| rng.gen_range(0.0..1.0));
            let s = ConsensusGraph::new(s_init)?;
            let f = SpectralEmbedding::new(random_orthonormal(n, params.k, &mut rng))?;
            (s, f)
        }
        InitStrategy::WarmStart => {
            let singles = data
                .views()
                .iter()
                .enumerate()
                .map(|(v, x)| graph::learn_single_view_graph(x, params.alpha, v))
                .collect::<Result<Vec<_>>>()?;
            let s = fusion::average_graph(&singles)?;
            let q = spectral::build_laplacian(&s);
            let f = spectral::update_embedding(&q, params.k)?;
            (s, f)
        }
    };
    let zs = clipped_view_updates(grams, s.matrix(), params.alpha, params.beta, &w)?;
    Ok(SolverState { zs, s, f, w })
}

/// Gaussian matrix with columns orthonormalized by two passes of modified
/// Gram-Schmidt.
fn random_orthonormal(n: usize, k: usize, rng: &mut ChaCha20Rng) -> Array2<f64> {
    let mut f = Array2::from_shape_fn((n, k), |_| rng.sample::<f64, _>(StandardNormal));
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let proj: f64 = (0..n).map(|r| f[[r, i]] * f[[r, j]]).sum();
                for r in 0..n {
                    f[[r, j]] -= proj * f[[r, i]];
                }
            }
        }
        let norm: f64 = (0..n).map(|r| f[[r, j]] * f[[r, j]]).sum::<f64>().sqrt();
        for r in 0..n {
            f[[r, j]] /= norm;
        }
    }
    f
}

fn preclip_view_updates(
    grams: &[Array2<f64>],
    s_raw: &Array2<f64>,
    alpha: f64,
    beta: f64,
    w: &ViewWeights,
) -> Result<Vec<Array2<f64>>> {
    grams
        .par_iter()
        .zip(w.as_slice().par_iter())
        .map(|(g, &wv)| graph::solve_view_update(g, Some(s_raw), alpha, beta * wv))
        .collect()
}

fn clipped_view_updates(
    grams: &[Array2<f64>],
    s_raw: &Array2<f64>,
    alpha: f64,
    beta: f64,
    w: &ViewWeights,
) -> Result<Vec<ViewGraph>> {
    preclip_view_updates(grams, s_raw, alpha, beta, w)?
        .into_iter()
        .enumerate()
        .map(|(v, raw)| ViewGraph::clipped(raw, v))
        .collect()
}

struct MonotoneChecker {
    enabled: bool,
    warnings: Vec<String>,
}

impl MonotoneChecker {
    fn new(enabled: bool) -> Self {
        Self {
            enabled,
            warnings: Vec::new(),
        }
    }

    fn check(&mut self, what: &str, iter: usize, before: f64, after: f64) {
        if !self.enabled {
            return;
        }
        let slack = 1e-9 * (1.0 + before.abs());
        if after > before + slack {
            let msg = format!(
                "iteration {iter}: {what} increased its block objective \
                 ({before:.6e} -> {after:.6e})"
            );
            debug_assert!(false, "{msg}");
            self.warnings.push(msg);
        }
    }
}

/// The full structured solver.
///
/// Expects a normalized dataset. Returns cluster labels (k-means on the
/// final embedding rows), metrics against ground truth when available, and
/// the complete iteration trace. Hitting `max_iter` without convergence is
/// recorded in the trace, not an error.
pub fn gfsc(data: &MultiViewDataset, params: &Hyperparams) -> Result<ClusteringResult> {
    gfsc_with(data, params, &SolverOptions::default())
}

pub fn gfsc_with(
    data: &MultiViewDataset,
    params: &Hyperparams,
    opts: &SolverOptions,
) -> Result<ClusteringResult> {
    gfsc_full(data, params, opts).map(|(result, _)| result)
}

/// Like [`gfsc_with`] but also returns the final block state, for callers
/// that inspect the learned graphs.
pub fn gfsc_full(
    data: &MultiViewDataset,
    params: &Hyperparams,
    opts: &SolverOptions,
) -> Result<(ClusteringResult, SolverState)> {
    params.validate()?;
    let grams = compute_grams(data)?;
    let state = initialize_with(data, &grams, params, opts.init)?;
    let SolverState {
        mut zs,
        s: mut s_prev,
        mut f,
        mut w,
    } = state;

    let mut trace = SolverTrace::default();
    let mut checker = MonotoneChecker::new(opts.monotone_checks);
    let mut final_q: Option<spectral::SpectralQuantities> = None;

    for iter in 1..=params.max_iter {
        let started = Instant::now();

        // steps 1-2: per-view closed form, then projection onto Z >= 0
        // (iteration 1 reuses the pass done by initialization)
        if iter > 1 {
            let raws =
                preclip_view_updates(&grams, s_prev.matrix(), params.alpha, params.beta, &w)?;
            if checker.enabled {
                for ((raw, z_old), (x, &wv)) in raws
                    .iter()
                    .zip(&zs)
                    .zip(data.views().iter().zip(w.as_slice()))
                {
                    let before = graph::view_block_objective(
                        x,
                        z_old.matrix(),
                        Some(s_prev.matrix()),
                        params.alpha,
                        params.beta * wv,
                    );
                    let after = graph::view_block_objective(
                        x,
                        raw,
                        Some(s_prev.matrix()),
                        params.alpha,
                        params.beta * wv,
                    );
                    checker.check("view-graph update (pre-clip)", iter, before, after);
                }
            }
            zs = raws
                .into_iter()
                .enumerate()
                .map(|(v, raw)| ViewGraph::clipped(raw, v))
                .collect::<Result<Vec<_>>>()?;
        }

        // step 3: consensus update against the current embedding distances
        let p = f.pairwise_sq_distances();
        let s_new = fusion::update_consensus(&zs, &w, &p, params.beta, params.gamma)?;
        if !fro_norm(s_new.matrix()).is_finite() {
            return Err(Error::Numerics(format!(
                "consensus graph diverged at iteration {iter}; gamma = {} is \
                 too large relative to beta = {} for this data",
                params.gamma, params.beta
            )));
        }
        if checker.enabled {
            let before = fusion::consensus_block_objective(
                &zs,
                s_prev.matrix(),
                &p,
                params.beta,
                params.gamma,
                &w,
            );
            let after = fusion::consensus_block_objective(
                &zs,
                s_new.matrix(),
                &p,
                params.beta,
                params.gamma,
                &w,
            );
            checker.check("consensus update", iter, before, after);
        }

        // step 4: embedding from the k smallest Laplacian eigenvectors
        let q = spectral::build_laplacian(&s_new);
        let f_new = spectral::update_embedding(&q, params.k)?;
        if checker.enabled {
            let before = spectral::laplacian_quadratic(f.matrix(), q.laplacian());
            let after = spectral::laplacian_quadratic(f_new.matrix(), q.laplacian());
            checker.check("embedding update", iter, before, after);
            // Ky Fan: the minimum equals the sum of the k smallest eigenvalues
            let sigma = q.sigma()?;
            let kyfan: f64 = sigma.iter().take(params.k).sum();
            if (after - kyfan).abs() > 1e-8 * (1.0 + kyfan.abs()) {
                let msg = format!(
                    "iteration {iter}: Tr(F'LF) = {after:.6e} deviates from the \
                     k-smallest eigenvalue sum {kyfan:.6e}"
                );
                debug_assert!(false, "{msg}");
                checker.warnings.push(msg);
            }
        }
        f = f_new;

        // step 5: inverse-distance weights
        let w_new = fusion::compute_weights(&zs, &s_new)?;

        let denom = fro_norm(s_prev.matrix()).max(f64::MIN_POSITIVE);
        let rel_change = fro_norm(&(s_new.matrix() - s_prev.matrix())) / denom;
        let obj = objective(&zs, &s_new, &f, data, params, &w_new);
        trace.iterations.push(IterationRecord {
            objective: obj,
            rel_change,
            weights: w_new.as_slice().to_vec(),
            wall_secs: started.elapsed().as_secs_f64(),
        });

        s_prev = s_new;
        w = w_new;
        final_q = Some(q);

        if rel_change < params.tol {
            trace.converged = true;
            break;
        }
    }

    trace.warnings.append(&mut checker.warnings);
    if let Some(q) = &final_q {
        let counts = spectral::component_counts_from(
            q,
            s_prev.symmetrized(),
            spectral::DEFAULT_EIG_TOL,
            spectral::DEFAULT_EDGE_TOL,
        )?;
        if counts.spectral != counts.traversal {
            trace.warnings.push(format!(
                "component counts disagree on the final consensus graph: \
                 spectral {} vs traversal {}",
                counts.spectral, counts.traversal
            ));
        }
        trace.components = Some(counts);
    }

    // discretize the relaxed indicators
    let points = if opts.normalize_embedding_rows {
        spectral::normalize_rows(f.matrix())
    } else {
        f.matrix().clone()
    };
    let km = metrics::kmeans(&points, params.k, params.seed, opts.kmeans_restarts)?;
    let result = finish(km.labels, data, trace)?;
    Ok((
        result,
        SolverState {
            zs,
            s: s_prev,
            f,
            w,
        },
    ))
}

/// Fusion-only solver: alternates the per-view updates, the weighted-mean
/// consensus, and the weight update until the consensus stabilizes, then
/// runs classic spectral clustering on the fused graph.
pub fn gf(data: &MultiViewDataset, params: &Hyperparams) -> Result<ClusteringResult> {
    gf_with(data, params, &SolverOptions::default())
}

pub fn gf_with(
    data: &MultiViewDataset,
    params: &Hyperparams,
    opts: &SolverOptions,
) -> Result<ClusteringResult> {
    gf_full(data, params, opts).map(|(result, _)| result)
}

/// Block state of the fusion-only solver (it maintains no embedding).
#[derive(Debug, Clone)]
pub struct GfState {
    pub zs: Vec<ViewGraph>,
    pub s: ConsensusGraph,
    pub w: ViewWeights,
}

/// Like [`gf_with`] but also returns the final block state.
pub fn gf_full(
    data: &MultiViewDataset,
    params: &Hyperparams,
    opts: &SolverOptions,
) -> Result<(ClusteringResult, GfState)> {
    params.validate()?;
    let grams = compute_grams(data)?;
    let n = data.n();
    if params.k > n {
        return Err(Error::Input(format!(
            "k = {} exceeds the sample count {n}",
            params.k
        )));
    }

    let mut s_prev = match opts.init {
        InitStrategy::Random => {
            let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
            ConsensusGraph::new(Array2::from_shape_fn((n, n), |_| rng.gen_range(0.0..1.0)))?
        }
        InitStrategy::WarmStart => {
            let singles = data
                .views()
                .iter()
                .enumerate()
                .map(|(v, x)| graph::learn_single_view_graph(x, params.alpha, v))
                .collect::<Result<Vec<_>>>()?;
            fusion::average_graph(&singles)?
        }
    };
    let mut w = ViewWeights::uniform(data.t())?;
    let zero_p = Array2::zeros((n, n));

    let mut trace = SolverTrace::default();
    let mut checker = MonotoneChecker::new(opts.monotone_checks);
    let mut zs = clipped_view_updates(&grams, s_prev.matrix(), params.alpha, params.beta, &w)?;

    for iter in 1..=params.max_iter {
        let started = Instant::now();
        if iter > 1 {
            zs = clipped_view_updates(&grams, s_prev.matrix(), params.alpha, params.beta, &w)?;
        }
        // gamma = 0 collapses the consensus update to the weighted mean
        let s_new = fusion::update_consensus(&zs, &w, &zero_p, params.beta, 0.0)?;
        if checker.enabled {
            let before = fusion::consensus_block_objective(
                &zs,
                s_prev.matrix(),
                &zero_p,
                params.beta,
                0.0,
                &w,
            );
            let after = fusion::consensus_block_objective(
                &zs,
                s_new.matrix(),
                &zero_p,
                params.beta,
                0.0,
                &w,
            );
            checker.check("consensus update", iter, before, after);
        }
        let w_new = fusion::compute_weights(&zs, &s_new)?;

        let denom = fro_norm(s_prev.matrix()).max(f64::MIN_POSITIVE);
        let rel_change = fro_norm(&(s_new.matrix() - s_prev.matrix())) / denom;
        let obj = fusion_objective(&zs, &s_new, data, params.alpha, params.beta, &w_new);
        trace.iterations.push(IterationRecord {
            objective: obj,
            rel_change,
            weights: w_new.as_slice().to_vec(),
            wall_secs: started.elapsed().as_secs_f64(),
        });

        s_prev = s_new;
        w = w_new;
        if rel_change < params.tol {
            trace.converged = true;
            break;
        }
    }

    trace.warnings.append(&mut checker.warnings);
    let labels = spectral::spectral_clustering(&s_prev, params.k, params.seed)?;
    let result = finish(labels, data, trace)?;
    Ok((result, GfState { zs, s: s_prev, w }))
}

fn finish(
    labels: Vec<usize>,
    data: &MultiViewDataset,
    trace: SolverTrace,
) -> Result<ClusteringResult> {
    let (acc, nmi, purity) = match data.labels() {
        Some(truth) => (
            Some(metrics::accuracy(&labels, truth)?),
            Some(metrics::nmi(&labels, truth)?),
            Some(metrics::purity(&labels, truth)?),
        ),
        None => (None, None, None),
    };
    Ok(ClusteringResult {
        labels,
        acc,
        nmi,
        purity,
        trace,
    })
}
