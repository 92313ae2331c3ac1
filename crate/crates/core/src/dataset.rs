//! Manifest-driven dataset ingestion.
//!
//! Datasets are described by a TOML manifest naming one CSV file per view
//! plus an optional label file. The manifest carries the expected sample,
//! view, and class counts so ingestion fails loudly on the wrong variant of
//! a benchmark rather than producing silently wrong numbers.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::MultiViewDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Rows are features, columns are samples (the in-memory layout).
    FeaturesXSamples,
    /// Rows are samples, columns are features; transposed on load.
    SamplesXFeatures,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViewSpec {
    pub path: String,
    pub orientation: Orientation,
    /// Skip a header row when parsing.
    #[serde(default)]
    pub header: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub expected_n: usize,
    pub expected_t: usize,
    pub expected_k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_path: Option<String>,
    pub views: Vec<ViewSpec>,
}

impl DatasetManifest {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Dataset(format!("cannot read manifest {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| Error::Dataset(format!("cannot parse manifest {}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| Error::Dataset(format!("cannot serialize manifest: {e}")))
    }
}

/// Parses a numeric CSV file into a dense matrix (no header by default).
pub fn read_csv_matrix(path: &Path, header: bool) -> Result<Array2<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Dataset(format!("cannot open {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Error::Dataset(format!("{}:{}: {e}", path.display(), i + 1)))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|_| {
                    Error::Dataset(format!(
                        "{}:{}: column {} is not a number: {field:?}",
                        path.display(),
                        i + 1,
                        j + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Dataset(format!(
                    "{}:{}: ragged row ({} fields, expected {})",
                    path.display(),
                    i + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Dataset(format!("{} is empty", path.display())));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Array2::from_shape_vec((r, c), rows.into_iter().flatten().collect())
        .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))
}

/// Writes a matrix as headerless CSV, one row per line.
pub fn write_csv_matrix(path: &Path, m: &Array2<f64>) -> Result<()> {
    let mut out = String::new();
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a single-column label file (integers, one per line).
pub fn read_labels(path: &Path) -> Result<Vec<i64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Dataset(format!("cannot read labels {}: {e}", path.display())))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            let field = line.trim();
            field
                .parse::<i64>()
                .or_else(|_| field.parse::<f64>().map(|v| v.round() as i64))
                .map_err(|_| {
                    Error::Dataset(format!(
                        "{}:{}: not an integer label: {field:?}",
                        path.display(),
                        i + 1
                    ))
                })
        })
        .collect()
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let out: String = labels.iter().map(|l| format!("{l}\n")).collect();
    fs::write(path, out)?;
    Ok(())
}

/// Loads, validates, and normalizes a dataset described by a manifest file.
/// View paths are resolved relative to the manifest's directory.
pub fn load_dataset(manifest_path: &Path) -> Result<MultiViewDataset> {
    let manifest = DatasetManifest::from_path(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    load_dataset_from(&manifest, base)
}

pub fn load_dataset_from(manifest: &DatasetManifest, base: &Path) -> Result<MultiViewDataset> {
    if manifest.views.len() != manifest.expected_t {
        return Err(Error::Dataset(format!(
            "manifest '{}' declares expected_t = {} but lists {} views",
            manifest.name,
            manifest.expected_t,
            manifest.views.len()
        )));
    }

    let mut views = Vec::with_capacity(manifest.views.len());
    let mut diags = Vec::new();
    for (v, spec) in manifest.views.iter().enumerate() {
        let path: PathBuf = base.join(&spec.path);
        let raw = read_csv_matrix(&path, spec.header)?;
        let oriented = match spec.orientation {
            Orientation::FeaturesXSamples => raw,
            Orientation::SamplesXFeatures => raw.t().to_owned(),
        };
        diags.push(format!(
            "view {v} ({}): {} features x {} samples",
            spec.path,
            oriented.nrows(),
            oriented.ncols()
        ));
        views.push(oriented);
    }

    for (v, view) in views.iter().enumerate() {
        if view.ncols() != manifest.expected_n {
            return Err(Error::Dataset(format!(
                "view {v} has {} samples, manifest '{}' expects {};\n  {}",
                view.ncols(),
                manifest.name,
                manifest.expected_n,
                diags.join("\n  ")
            )));
        }
    }

    let labels = match &manifest.labels_path {
        Some(rel) => {
            let raw = read_labels(&base.join(rel))?;
            Some(raw)
        }
        None => None,
    };

    let names: Vec<String> = manifest
        .views
        .iter()
        .enumerate()
        .map(|(v, s)| s.name.clone().unwrap_or_else(|| format!("view{v}")))
        .collect();

    let data = MultiViewDataset::new(views, labels, Some(names))?;
    if let Some(k) = data.num_classes() {
        if k != manifest.expected_k {
            return Err(Error::Dataset(format!(
                "labels contain {k} classes, manifest '{}' expects {}",
                manifest.name, manifest.expected_k
            )));
        }
    }
    data.normalized()
}
