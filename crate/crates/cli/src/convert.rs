//! Converters from raw benchmark distributions into the CSV + manifest
//! layout the loader expects.

use std::fs;
use std::path::{Path, PathBuf};

use gfsc_core::dataset::{DatasetManifest, Orientation, ViewSpec};
use gfsc_core::error::{Error, Result};
use ndarray::Array2;

/// The six views of the UCI Multiple Features ("mfeat") handwritten digits
/// set, in the order used for reporting: file name, display name, feature
/// count.
pub const MFEAT_VIEWS: [(&str, &str, usize); 6] = [
    ("mfeat-fac", "Profile correlations", 216),
    ("mfeat-fou", "Fourier coefficients", 76),
    ("mfeat-kar", "Karhunen coefficients", 64),
    ("mfeat-mor", "Morphological", 6),
    ("mfeat-pix", "Pixel averages", 240),
    ("mfeat-zer", "Zernike moments", 47),
];

const MFEAT_SAMPLES: usize = 2000;
const MFEAT_CLASSES: usize = 10;

fn read_whitespace_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Dataset(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    Error::Dataset(format!("{}:{}: not a number: {f:?}", path.display(), i + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Dataset(format!(
                    "{}:{}: ragged row",
                    path.display(),
                    i + 1
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

/// Converts the raw UCI Multiple Features distribution (six
/// whitespace-separated `mfeat-*` files, 2000 samples sorted by digit, 200
/// per class) into per-view CSVs, a label file, and a validated manifest.
/// Returns the manifest path.
pub fn convert_mfeat(src: &Path, out: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out)?;
    let mut specs = Vec::new();
    for (file, name, expected_features) in MFEAT_VIEWS {
        let m = read_whitespace_matrix(&src.join(file))?;
        if m.nrows() != MFEAT_SAMPLES || m.ncols() != expected_features {
            return Err(Error::Dataset(format!(
                "{file}: got {}x{}, expected {MFEAT_SAMPLES}x{expected_features} \
                 (samples x features)",
                m.nrows(),
                m.ncols()
            )));
        }
        let csv_name = format!("{file}.csv");
        gfsc_core::dataset::write_csv_matrix(&out.join(&csv_name), &m)?;
        specs.push(ViewSpec {
            path: csv_name,
            orientation: Orientation::SamplesXFeatures,
            header: false,
            name: Some(name.to_string()),
        });
    }

    // samples are sorted by digit, 200 per class
    let labels: Vec<usize> = (0..MFEAT_SAMPLES)
        .map(|i| i / (MFEAT_SAMPLES / MFEAT_CLASSES))
        .collect();
    gfsc_core::dataset::write_labels(&out.join("labels.csv"), &labels)?;

    let manifest = DatasetManifest {
        name: "digits".into(),
        expected_n: MFEAT_SAMPLES,
        expected_t: MFEAT_VIEWS.len(),
        expected_k: MFEAT_CLASSES,
        labels_path: Some("labels.csv".into()),
        views: specs,
    };
    let manifest_path = out.join("manifest.toml");
    fs::write(&manifest_path, manifest.to_toml()?)?;
    Ok(manifest_path)
}
