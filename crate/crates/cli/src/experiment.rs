//! Method dispatch and the repetition / grid-search protocols.

use gfsc_core::error::{Error, Result};
use gfsc_core::metrics;
use gfsc_core::solver::{self, InitStrategy, SolverOptions};
use gfsc_core::types::{ClusteringResult, Hyperparams, MultiViewDataset, SolverTrace};
use gfsc_core::{fusion, graph, spectral, ConsensusGraph};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, GridSpec, Method};
use crate::report::{GridCell, GridReport, Report, RunRecord};

fn solver_options(config: &ExperimentConfig) -> SolverOptions {
    SolverOptions {
        init: if config.warm_start {
            InitStrategy::WarmStart
        } else {
            InitStrategy::Random
        },
        normalize_embedding_rows: config.normalize_rows,
        ..Default::default()
    }
}

fn evaluate(
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

/// Runs one method once on a normalized dataset.
pub fn run_method(
    data: &MultiViewDataset,
    method: Method,
    params: &Hyperparams,
    opts: &SolverOptions,
) -> Result<ClusteringResult> {
    match method {
        Method::Gfsc => solver::gfsc_with(data, params, opts),
        Method::Gf => solver::gf_with(data, params, opts),
        Method::ScView(v) => {
            if v >= data.t() {
                return Err(Error::Input(format!(
                    "sc-view:{v} out of range for a {}-view dataset",
                    data.t()
                )));
            }
            let z = graph::learn_single_view_graph(data.view(v), params.alpha, v)?;
            let s = ConsensusGraph::new(z.matrix().clone())?;
            let labels = spectral::spectral_clustering(&s, params.k, params.seed)?;
            evaluate(labels, data, SolverTrace::default())
        }
        Method::ScAve => {
            let singles = data
                .views()
                .iter()
                .enumerate()
                .map(|(v, x)| graph::learn_single_view_graph(x, params.alpha, v))
                .collect::<Result<Vec<_>>>()?;
            let s = fusion::average_graph(&singles)?;
            let labels = spectral::spectral_clustering(&s, params.k, params.seed)?;
            evaluate(labels, data, SolverTrace::default())
        }
        Method::KmeansConcat => {
            // samples as rows of the stacked feature matrix
            let stacked = data.concatenated();
            let points = stacked.t().to_owned();
            let km = metrics::kmeans(
                &points,
                params.k,
                params.seed,
                metrics::DEFAULT_KMEANS_RESTARTS,
            )?;
            evaluate(km.labels, data, SolverTrace::default())
        }
    }
}

/// A report plus the per-run solver traces (the traces carry timing and are
/// written separately from the deterministic report).
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: Report,
    pub traces: Vec<Option<SolverTrace>>,
}

fn run_one_repetition(
    data: &MultiViewDataset,
    config: &ExperimentConfig,
    rep: usize,
) -> (RunRecord, Option<SolverTrace>) {
    let params = Hyperparams {
        seed: config.params.seed + rep as u64,
        ..config.params.clone()
    };
    match run_method(data, config.method, &params, &solver_options(config)) {
        Ok(res) => (
            RunRecord {
                seed: params.seed,
                acc: res.acc,
                nmi: res.nmi,
                purity: res.purity,
                iterations: res.trace.len(),
                converged: res.trace.converged,
                components: res.trace.components,
                error: None,
            },
            Some(res.trace),
        ),
        Err(e) => (
            RunRecord {
                seed: params.seed,
                acc: None,
                nmi: None,
                purity: None,
                iterations: 0,
                converged: false,
                components: None,
                error: Some(e.to_string()),
            },
            None,
        ),
    }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Input(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

/// Runs `config.repetitions` seeded repetitions (run `r` uses
/// `base seed + r`) and aggregates mean/std of the metrics. Per-run failures
/// are recorded in the report; the report is still produced for completed
/// runs.
pub fn run_experiment(
    config: &ExperimentConfig,
    data: &MultiViewDataset,
) -> Result<ExperimentOutcome> {
    config.validate()?;
    let results: Vec<(RunRecord, Option<SolverTrace>)> = with_pool(config.workers, || {
        (0..config.repetitions)
            .into_par_iter()
            .map(|rep| run_one_repetition(data, config, rep))
            .collect()
    })?;
    let (runs, traces): (Vec<RunRecord>, Vec<Option<SolverTrace>>) = results.into_iter().unzip();
    let report = Report::summarize(
        config.dataset_name.clone(),
        config.method.to_string(),
        config.params.clone(),
        runs,
    );
    Ok(ExperimentOutcome { report, traces })
}

/// Evaluates every `(alpha, beta, gamma)` cell with the repetition protocol
/// and returns the full surface plus the argmax cell (by mean accuracy;
/// ties go to the earlier cell in row-major `alpha x beta x gamma` order).
pub fn grid_search(
    config: &ExperimentConfig,
    grid: &GridSpec,
    data: &MultiViewDataset,
) -> Result<GridReport> {
    config.validate()?;
    grid.validate()?;

    let mut combos = Vec::with_capacity(grid.cell_count());
    for &alpha in &grid.alphas {
        for &beta in &grid.betas {
            for &gamma in &grid.gammas {
                combos.push((alpha, beta, gamma));
            }
        }
    }

    let cells: Vec<GridCell> = with_pool(config.workers, || {
        combos
            .par_iter()
            .map(|&(alpha, beta, gamma)| {
                let cell_config = ExperimentConfig {
                    params: Hyperparams {
                        alpha,
                        beta,
                        gamma,
                        ..config.params.clone()
                    },
                    workers: None, // already inside the pool
                    ..config.clone()
                };
                let runs: Vec<RunRecord> = (0..cell_config.repetitions)
                    .map(|rep| run_one_repetition(data, &cell_config, rep).0)
                    .collect();
                GridCell {
                    alpha,
                    beta,
                    gamma,
                    report: Report::summarize(
                        cell_config.dataset_name.clone(),
                        cell_config.method.to_string(),
                        cell_config.params.clone(),
                        runs,
                    ),
                }
            })
            .collect()
    })?;

    let mut best = 0;
    let mut best_acc = f64::NEG_INFINITY;
    for (i, cell) in cells.iter().enumerate() {
        let acc = cell
            .report
            .summary
            .acc
            .map_or(f64::NEG_INFINITY, |m| m.mean);
        if acc > best_acc {
            best_acc = acc;
            best = i;
        }
    }
    Ok(GridReport {
        dataset: config.dataset_name.clone(),
        method: config.method.to_string(),
        cells,
        best,
    })
}
