//! Sample matrices per regime, their CSV form, and the regime manifest.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::ci::Regime;
use crate::error::{Error, Result};
use crate::graph::{interventions_from_targets, Intervention};
use crate::vertex_set::VertexSet;

/// `m × n` samples from one regime.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub regime: Regime,
    pub samples: DMatrix<f64>,
    pub labels: Vec<String>,
    pub seed: Option<u64>,
}

impl Dataset {
    pub fn new(regime: Regime, samples: DMatrix<f64>, seed: Option<u64>) -> Result<Self> {
        if samples.nrows() == 0 {
            return Err(Error::SampleSize { needed: 1, have: 0 });
        }
        let labels = default_labels(samples.ncols());
        Ok(Self { regime, samples, labels, seed })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Input(format!("{} labels for {} columns", labels.len(), self.n())));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n(&self) -> usize {
        self.samples.ncols()
    }

    /// Unbiased sample covariance.
    pub fn covariance(&self) -> DMatrix<f64> {
        let m = self.m();
        let mean = self.samples.row_mean();
        let mut centered = self.samples.clone();
        for mut row in centered.row_iter_mut() {
            row -= &mean;
        }
        let denom = if m > 1 { (m - 1) as f64 } else { 1.0 };
        (centered.transpose() * &centered) / denom
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.labels)?;
        for row in self.samples.row_iter() {
            w.write_record(row.iter().map(|x| format!("{x:.17e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path, regime: Regime) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let labels: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let n = labels.len();
        let mut values = Vec::new();
        let mut m = 0;
        for record in r.records() {
            let record = record?;
            if record.len() != n {
                return Err(Error::Input(format!(
                    "{}: row {} has {} fields, header has {n}",
                    path.display(),
                    m + 1,
                    record.len()
                )));
            }
            for field in &record {
                let x: f64 = field.trim().parse().map_err(|_| {
                    Error::Input(format!("{}: bad number {field:?}", path.display()))
                })?;
                values.push(x);
            }
            m += 1;
        }
        let samples = DMatrix::from_row_slice(m, n, &values);
        Dataset::new(regime, samples, None)?.with_labels(labels)
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("X{i}")).collect()
}

/// `{"observational": "<path>", "interventions": [{"targets": [..], "path": "<path>"}]}`.
///
/// `path` entries may be omitted when only the targets are needed, as with
/// the exact oracle.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RegimeManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observational: Option<String>,
    #[serde(default)]
    pub interventions: Vec<InterventionEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterventionEntry {
    pub targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

impl RegimeManifest {
    pub fn read(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path)?;
        let manifest: Self = serde_json::from_str(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((manifest, base))
    }

    /// Interventions with ids `0..k` in manifest order.
    pub fn interventions(&self) -> Vec<Intervention> {
        interventions_from_targets(
            self.interventions
                .iter()
                .map(|e| e.targets.iter().copied().collect::<VertexSet>()),
        )
    }

    pub fn load_observational(&self, base: &Path) -> Result<Dataset> {
        let rel = self
            .observational
            .as_ref()
            .ok_or_else(|| Error::Input("manifest has no observational data".into()))?;
        Dataset::read_csv(&base.join(rel), Regime::Observational)
    }

    pub fn load_interventional(&self, base: &Path) -> Result<Vec<(Intervention, Dataset)>> {
        self.interventions()
            .into_iter()
            .zip(&self.interventions)
            .map(|(i, entry)| {
                let rel = entry.path.as_ref().ok_or_else(|| {
                    Error::Input(format!("intervention {} has no data path", i.id))
                })?;
                let data = Dataset::read_csv(&base.join(rel), Regime::Intervention(i.id))?;
                Ok((i, data))
            })
            .collect()
    }
}
