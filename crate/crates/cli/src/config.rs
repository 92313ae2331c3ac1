//! Experiment configuration: the method under test, hyperparameters, and
//! the repetition protocol.

use std::fmt;
use std::str::FromStr;

use gfsc_core::error::{Error, Result};
use gfsc_core::types::Hyperparams;
use serde::{Deserialize, Serialize};

/// Clustering method selector. `sc-view:v` runs classic spectral clustering
/// on view `v`'s stand-alone graph; `sc-ave` on the averaged graph;
/// `kmeans-concat` runs k-means on concatenated features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Gfsc,
    Gf,
    ScView(usize),
    ScAve,
    KmeansConcat,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "gfsc" => Ok(Method::Gfsc),
            "gf" => Ok(Method::Gf),
            "sc-ave" => Ok(Method::ScAve),
            "kmeans-concat" | "km" => Ok(Method::KmeansConcat),
            other => {
                if let Some(v) = other.strip_prefix("sc-view:") {
                    let idx = v
                        .parse::<usize>()
                        .map_err(|_| Error::Input(format!("bad view index in method {s:?}")))?;
                    Ok(Method::ScView(idx))
                } else {
                    Err(Error::Input(format!(
                        "unknown method {s:?} (expected gfsc, gf, sc-view:V, sc-ave, kmeans-concat)"
                    )))
                }
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Gfsc => write!(f, "gfsc"),
            Method::Gf => write!(f, "gf"),
            Method::ScView(v) => write!(f, "sc-view:{v}"),
            Method::ScAve => write!(f, "sc-ave"),
            Method::KmeansConcat => write!(f, "kmeans-concat"),
        }
    }
}

/// Full description of one experiment: a method, its hyperparameters, and
/// how many seeded repetitions to run. Run `r` uses `params.seed + r`.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset_name: String,
    pub method: Method,
    pub params: Hyperparams,
    pub repetitions: usize,
    /// Worker threads for repetitions/grid cells; `None` uses the global
    /// default.
    pub workers: Option<usize>,
    /// Initialize the structured solver from the averaged stand-alone
    /// graphs instead of random matrices.
    pub warm_start: bool,
    /// Normalize embedding rows before the final k-means inside GFSC.
    pub normalize_rows: bool,
}

impl ExperimentConfig {
    pub fn new(dataset_name: impl Into<String>, method: Method, params: Hyperparams) -> Self {
        Self {
            dataset_name: dataset_name.into(),
            method,
            params,
            repetitions: 10,
            workers: None,
            warm_start: false,
            normalize_rows: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.repetitions < 1 {
            return Err(Error::Input("repetitions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-parameter value lists for grid search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.betas.is_empty() || self.gammas.is_empty() {
            return Err(Error::Input("grid value lists must be nonempty".into()));
        }
        for v in self.alphas.iter().chain(&self.betas).chain(&self.gammas) {
            if !(*v > 0.0) || !v.is_finite() {
                return Err(Error::Input(format!(
                    "grid values must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.alphas.len() * self.betas.len() * self.gammas.len()
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            alphas: default_log_grid(),
            betas: default_log_grid(),
            gammas: default_log_grid(),
        }
    }
}

/// The logarithmic grid `{1e-7, 1e-6, ..., 1e7}` used for parameter
/// sensitivity sweeps.
pub fn default_log_grid() -> Vec<f64> {
    (-7..=7).map(|e| 10f64.powi(e)).collect()
}
