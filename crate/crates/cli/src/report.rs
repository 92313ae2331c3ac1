//! Result files and the plain-text comparison table.
//!
//! Reports carry no wall-clock timing, so a report is byte-identical across
//! runs with the same config and seed. Timing lives in the optional per-run
//! trace files.

use std::fs;
use std::path::Path;

use gfsc_core::error::{Error, Result};
use gfsc_core::types::{ComponentCounts, Hyperparams, SolverTrace};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub acc: Option<f64>,
    pub nmi: Option<f64>,
    pub purity: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<ComponentCounts>,
    /// Populated when this repetition failed; metric fields are then None.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Sample standard deviation (zero for a single run).
    pub std: f64,
}

impl MetricSummary {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub acc: Option<MetricSummary>,
    pub nmi: Option<MetricSummary>,
    pub purity: Option<MetricSummary>,
    pub mean_iterations: f64,
    pub converged_runs: usize,
    pub failed_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub dataset: String,
    pub method: String,
    pub params: Hyperparams,
    pub repetitions: usize,
    pub runs: Vec<RunRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn summarize(
        dataset: String,
        method: String,
        params: Hyperparams,
        runs: Vec<RunRecord>,
    ) -> Self {
        let collect =
            |f: fn(&RunRecord) -> Option<f64>| -> Vec<f64> { runs.iter().filter_map(f).collect() };
        let ok_runs: Vec<&RunRecord> = runs.iter().filter(|r| r.error.is_none()).collect();
        let summary = Summary {
            acc: MetricSummary::from_values(&collect(|r| r.acc)),
            nmi: MetricSummary::from_values(&collect(|r| r.nmi)),
            purity: MetricSummary::from_values(&collect(|r| r.purity)),
            mean_iterations: if ok_runs.is_empty() {
                0.0
            } else {
                ok_runs.iter().map(|r| r.iterations as f64).sum::<f64>() / ok_runs.len() as f64
            },
            converged_runs: ok_runs.iter().filter(|r| r.converged).count(),
            failed_runs: runs.len() - ok_runs.len(),
        };
        let repetitions = runs.len();
        Self {
            dataset,
            method,
            params,
            repetitions,
            runs,
            summary,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Input(format!("cannot serialize report: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("cannot parse report: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

fn cell(metric: Option<MetricSummary>) -> String {
    match metric {
        Some(m) => format!("{:.2}({:.2})", 100.0 * m.mean, 100.0 * m.std),
        None => "-".into(),
    }
}

/// Plain-text comparison table for benchmark reporting:
/// one row per method, `mean(std)` percentages for Acc, Purity, NMI.
pub fn render_table(reports: &[Report]) -> String {
    let mut rows = vec![(
        "Method".to_string(),
        "Acc".to_string(),
        "Purity".to_string(),
        "NMI".to_string(),
    )];
    for r in reports {
        rows.push((
            r.method.clone(),
            cell(r.summary.acc),
            cell(r.summary.purity),
            cell(r.summary.nmi),
        ));
    }
    let mut widths = [0usize; 4];
    for (a, b, c, d) in &rows {
        widths[0] = widths[0].max(a.len());
        widths[1] = widths[1].max(b.len());
        widths[2] = widths[2].max(c.len());
        widths[3] = widths[3].max(d.len());
    }
    let mut out = String::new();
    for (i, (a, b, c, d)) in rows.iter().enumerate() {
        out.push_str(&format!(
            "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}\n",
            a,
            b,
            c,
            d,
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3],
        ));
        if i == 0 {
            out.push_str(&format!(
                "{}\n",
                "-".repeat(widths.iter().sum::<usize>() + 6)
            ));
        }
    }
    out
}

/// One grid cell: the `(alpha, beta, gamma)` triple and its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub report: Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub dataset: String,
    pub method: String,
    pub cells: Vec<GridCell>,
    /// Index into `cells` of the best mean accuracy (ties: first).
    pub best: usize,
}

impl GridReport {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Input(format!("cannot serialize grid report: {e}")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&fs::read_to_string(path)?)
            .map_err(|e| Error::Input(format!("cannot parse grid report: {e}")))
    }

    /// The accuracy surface as CSV, one row per cell:
    /// `alpha,beta,gamma,acc_mean,acc_std,nmi_mean,purity_mean`.
    pub fn surface_csv(&self) -> String {
        let mut out = String::from("alpha,beta,gamma,acc_mean,acc_std,nmi_mean,purity_mean\n");
        for c in &self.cells {
            let s = &c.report.summary;
            let get = |m: Option<MetricSummary>| m.map_or(f64::NAN, |v| v.mean);
            let std = |m: Option<MetricSummary>| m.map_or(f64::NAN, |v| v.std);
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                c.alpha,
                c.beta,
                c.gamma,
                get(s.acc),
                std(s.acc),
                get(s.nmi),
                get(s.purity)
            ));
        }
        out
    }
}

/// Per-run trace files (these carry wall-clock timing and are therefore not
/// part of the deterministic report).
pub fn write_traces(dir: &Path, method: &str, traces: &[Option<SolverTrace>]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (r, trace) in traces.iter().enumerate() {
        if let Some(t) = trace {
            let text = serde_json::to_string_pretty(t)
                .map_err(|e| Error::Input(format!("cannot serialize trace: {e}")))?;
            fs::write(dir.join(format!("{method}_run{r}_trace.json")), text)?;
        }
    }
    Ok(())
}
