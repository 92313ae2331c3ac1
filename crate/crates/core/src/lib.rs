//! Multi-view spectral clustering by weighted multi-graph fusion.
//!
//! Each view of a multi-view dataset yields a self-expressive similarity
//! graph; the per-view graphs are fused into a single consensus graph with
//! inverse-distance view weights, while a spectral term steers the consensus
//! graph towards exactly `k` connected components. Everything is solved
//! jointly by alternating minimization.
//!
//! The crate is organized around the pipeline:
//!
//! - [`types`] — shared value objects (datasets, graphs, embeddings, traces)
//! - [`graph`] — per-view self-expressive graph learning
//! - [`fusion`] — view weighting and consensus-graph updates
//! - [`spectral`] — Laplacians, embeddings, connected components
//! - [`solver`] — the alternating solvers (`gfsc`, `gf`) and the objective
//! - [`metrics`] — clustering evaluation (Acc / NMI / Purity) and k-means
//! - [`dataset`] — manifest-driven CSV ingestion
//! - [`synth`] — planted-partition generator used as a correctness oracle

pub mod dataset;
pub mod error;
pub mod fusion;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod solver;
pub mod spectral;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use spectral::SpectralQuantities;
pub use types::{
    ClusteringResult, ConsensusGraph, Hyperparams, MultiViewDataset, SolverTrace,
    SpectralEmbedding, ViewGraph, ViewWeights,
};
