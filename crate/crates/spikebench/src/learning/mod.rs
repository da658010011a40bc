//! The three training algorithms sharing the same network core:
//! surrogate gradient learning, the tempotron rule, and bio-inspired
//! active learning.

pub mod bal;
pub mod info;
pub mod sgl;
pub mod tempotron;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::encoding::{encode_sample, normalize_features, EncoderConfig, FeatureVector, NormStats};
use crate::error::{Error, Result};
use crate::network::{forward, predict, NetworkConfig, NetworkWeights};

pub use bal::{bal_select, train_bal, BalParams};
pub use info::{mutual_information, spike_entropy};
pub use sgl::{sgl_error, sgl_layer_updates, surrogate_derivative, train_sgl, SglParams};
pub use tempotron::{
    psp_kernel, tempotron_potential, tempotron_t_max, tempotron_update, train_tempotron,
    TempotronParams,
};

/// Outcome of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub final_train_accuracy: f64,
    pub final_val_accuracy: f64,
    pub wall_time_seconds: f64,
    pub accuracy_curve: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels_queried: Option<usize>,
}

/// A trained classifier, serializable for `eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrainedModel {
    Feedforward {
        config: NetworkConfig,
        weights: NetworkWeights,
        encoder: EncoderConfig,
        norm: NormStats,
    },
    Tempotron {
        config: NetworkConfig,
        w_in_h1: crate::network::WeightMatrix,
        w_h1_h2: crate::network::WeightMatrix,
        unit_weights: [Vec<f64>; 2],
        params: TempotronParams,
        encoder: EncoderConfig,
        norm: NormStats,
    },
}

impl TrainedModel {
    /// Classify one raw feature vector.
    pub fn predict_raw(&self, raw: &[f64], sample_index: usize) -> Result<usize> {
        match self {
            TrainedModel::Feedforward {
                config,
                weights,
                encoder,
                norm,
            } => {
                let f = normalize_features(raw, norm)?;
                let input = encode_sample(&f, encoder, sample_index, 0)?;
                let record = forward(config, weights, &input)?;
                Ok(predict(&record))
            }
            TrainedModel::Tempotron {
                config,
                w_in_h1,
                w_h1_h2,
                unit_weights,
                params,
                encoder,
                norm,
            } => {
                let f = normalize_features(raw, norm)?;
                let input = encode_sample(&f, encoder, sample_index, 0)?;
                let (_, h2) = crate::network::forward_hidden(config, w_in_h1, w_h1_h2, &input)?;
                let times = h2.spike_times();
                let peaks = unit_weights
                    .iter()
                    .map(|w| {
                        let t = tempotron::tempotron_t_max(w, &times, params);
                        tempotron::tempotron_potential(w, &times, params, t as f64)
                    })
                    .collect::<Vec<_>>();
                Ok(if peaks[1] > peaks[0] { 1 } else { 0 })
            }
        }
    }

    /// Accuracy over a dataset.
    pub fn evaluate(&self, dataset: &Dataset) -> Result<f64> {
        if dataset.is_empty() {
            return Err(Error::InvalidInput("cannot evaluate on empty dataset".into()));
        }
        let mut correct = 0usize;
        for (i, (row, &label)) in dataset.features.iter().zip(&dataset.labels).enumerate() {
            if self.predict_raw(row, i)? == label as usize {
                correct += 1;
            }
        }
        Ok(correct as f64 / dataset.len() as f64)
    }
}

/// Normalized features for every sample of a dataset, with the stats that
/// produced them (fitted on the training set only).
pub(crate) struct Prepared {
    pub norm: NormStats,
    pub train: Vec<FeatureVector>,
}

pub(crate) fn prepare(train: &Dataset, val: &Dataset) -> Result<Prepared> {
    train.validate()?;
    val.features
        .iter()
        .try_for_each(|r| {
            if r.len() != train.dim() {
                Err(Error::ShapeMismatch("val dimension differs from train".into()))
            } else {
                Ok(())
            }
        })?;
    let norm = NormStats::fit(&train.features)?;
    let train_f = train
        .features
        .iter()
        .map(|r| normalize_features(r, &norm))
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        norm,
        train: train_f,
    })
}
