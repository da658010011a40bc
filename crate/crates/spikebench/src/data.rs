//! Dataset construction: synthetic two-Gaussian generation, CSV ingestion,
//! and stratified splitting.
//!
//! CSV contract: UTF-8, comma-separated, header row, decimal-point floats,
//! final column named `label` with values 0 or 1. LF or CRLF newlines.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Synthetic,
    Csv,
}

/// Feature matrix plus binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub feature_names: Option<Vec<String>>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, |f| f.len())
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }

    pub fn validate(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::InvalidInput("dataset needs at least 2 samples".into()));
        }
        let counts = self.class_counts();
        if counts[0] == 0 || counts[1] == 0 {
            return Err(Error::InvalidInput(
                "dataset must contain both classes".into(),
            ));
        }
        for (i, row) in self.features.iter().enumerate() {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite feature value in sample {i}"
                )));
            }
        }
        Ok(())
    }

    /// Select rows by index, preserving order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            provenance: self.provenance,
        }
    }
}

/// Two isotropic Gaussians, one per class, clamped to [0,1] per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub d: usize,
    pub n: usize,
    pub class_means: [Vec<f64>; 2],
    pub class_std: f64,
    pub class_balance: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// A separable default: means `sep_sigmas` standard deviations apart
    /// along the all-dimensions diagonal.
    pub fn separable(d: usize, n: usize, sep_sigmas: f64, seed: u64) -> Self {
        let std = 0.08;
        // per-dimension offset so the Euclidean mean distance is sep_sigmas * std
        let per_dim = sep_sigmas * std / (d as f64).sqrt();
        let mean0: Vec<f64> = vec![0.5 - per_dim / 2.0; d];
        let mean1: Vec<f64> = vec![0.5 + per_dim / 2.0; d];
        Self {
            d,
            n,
            class_means: [mean0, mean1],
            class_std: std,
            class_balance: 0.5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidParam("d must be >= 1".into()));
        }
        if self.n < 2 {
            return Err(Error::InvalidParam("n must be >= 2".into()));
        }
        if !(self.class_balance > 0.0 && self.class_balance < 1.0) {
            return Err(Error::InvalidParam("class_balance must be in (0,1)".into()));
        }
        if !(self.class_std > 0.0) {
            return Err(Error::InvalidParam("class_std must be > 0".into()));
        }
        if self.class_means[0].len() != self.d || self.class_means[1].len() != self.d {
            return Err(Error::ShapeMismatch("class mean length != d".into()));
        }
        Ok(())
    }
}

fn sample_gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; one value per call keeps the stream layout simple
    loop {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
    }
}

/// Deterministic synthetic generation. Label counts match the balance
/// exactly up to rounding; samples are interleaved then fixed in order.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n1 = (spec.n as f64 * spec.class_balance).round() as usize;
    let n0 = spec.n - n1;

    let mut features = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    let mut remaining = [n0, n1];
    // deterministic interleave: draw the label stream first
    for i in 0..spec.n {
        let label = if remaining[0] == 0 {
            1
        } else if remaining[1] == 0 {
            0
        } else if i % 2 == 0 {
            0
        } else {
            1
        };
        remaining[label as usize] -= 1;
        let mean = &spec.class_means[label as usize];
        let row: Vec<f64> = mean
            .iter()
            .map(|&m| (m + spec.class_std * sample_gaussian(&mut rng)).clamp(0.0, 1.0))
            .collect();
        features.push(row);
        labels.push(label as u8);
    }

    Ok(Dataset {
        features,
        labels,
        feature_names: None,
        provenance: Provenance::Synthetic,
    })
}

/// Load a dataset from the documented CSV format.
pub fn load_csv(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidInput(format!("cannot read {}: {e}", path.display()))
    })?;
    parse_csv(&text)
}

pub fn parse_csv(text: &str) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::CsvParse {
            row: 0,
            msg: "empty file".into(),
        })?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 2 {
        return Err(Error::CsvParse {
            row: 0,
            msg: "need at least one feature column and a label column".into(),
        });
    }
    if *cols.last().unwrap() != "label" {
        return Err(Error::CsvParse {
            row: 0,
            msg: format!("last column must be named 'label', got '{}'", cols.last().unwrap()),
        });
    }
    let d = cols.len() - 1;
    let feature_names: Vec<String> = cols[..d].iter().map(|s| s.to_string()).collect();

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row_idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != d + 1 {
            return Err(Error::CsvParse {
                row: row_idx,
                msg: format!("expected {} columns, found {}", d + 1, cells.len()),
            });
        }
        let mut row = Vec::with_capacity(d);
        for (j, cell) in cells[..d].iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::CsvParse {
                row: row_idx,
                msg: format!("non-numeric value '{cell}' in column {j}"),
            })?;
            if !v.is_finite() {
                return Err(Error::CsvParse {
                    row: row_idx,
                    msg: format!("non-finite value '{cell}' in column {j}"),
                });
            }
            row.push(v);
        }
        let label = match cells[d] {
            "0" => 0u8,
            "1" => 1u8,
            other => {
                return Err(Error::CsvParse {
                    row: row_idx,
                    msg: format!("label must be 0 or 1, got '{other}'"),
                })
            }
        };
        features.push(row);
        labels.push(label);
    }
    if features.is_empty() {
        return Err(Error::InvalidInput("csv contains no data rows".into()));
    }
    Ok(Dataset {
        features,
        labels,
        feature_names: Some(feature_names),
        provenance: Provenance::Csv,
    })
}

/// Serialize a dataset to the documented CSV format.
pub fn to_csv(dataset: &Dataset) -> String {
    let d = dataset.dim();
    let names: Vec<String> = match &dataset.feature_names {
        Some(n) => n.clone(),
        None => (0..d).map(|j| format!("f{j}")).collect(),
    };
    let mut out = String::new();
    out.push_str(&names.join(","));
    out.push_str(",label\n");
    for (row, label) in dataset.features.iter().zip(&dataset.labels) {
        for v in row {
            // round-trippable float formatting
            let _ = write!(out, "{v}");
            out.push(',');
        }
        let _ = write!(out, "{label}");
        out.push('\n');
    }
    out
}

pub fn save_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(dataset))?;
    Ok(())
}

/// Per-class seeded shuffle and split. Preserves class proportions within
/// one sample; train and val are disjoint and cover the dataset.
pub fn stratified_split(
    dataset: &Dataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidParam(format!(
            "train_fraction must be in (0,1), got {train_fraction}"
        )));
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &l) in dataset.labels.iter().enumerate() {
        by_class[l as usize].push(i);
    }
    for (c, idx) in by_class.iter().enumerate() {
        if idx.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "class {c} has {} samples; need at least 2 to split",
                idx.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut val_idx = Vec::new();
    for idx in by_class.iter_mut() {
        // Fisher-Yates
        for i in (1..idx.len()).rev() {
            let j = rng.gen_range(0..=i);
            idx.swap(i, j);
        }
        let n_train = ((idx.len() as f64) * train_fraction).round() as usize;
        let n_train = n_train.clamp(1, idx.len() - 1);
        train_idx.extend_from_slice(&idx[..n_train]);
        val_idx.extend_from_slice(&idx[n_train..]);
    }
    train_idx.sort_unstable();
    val_idx.sort_unstable();
    Ok((dataset.subset(&train_idx), dataset.subset(&val_idx)))
}
