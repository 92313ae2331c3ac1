//! Experiment harness: method dispatch, repetition protocol, grid search,
//! and report files for the multi-graph fusion clustering library.

pub mod config;
pub mod convert;
pub mod experiment;
pub mod report;

pub use config::{default_log_grid, ExperimentConfig, GridSpec, Method};
pub use experiment::{grid_search, run_experiment, run_method, ExperimentOutcome};
pub use report::{render_table, GridCell, GridReport, MetricSummary, Report, RunRecord};
