//! Bio-inspired active learning: uncertainty-weighted surrogate-gradient
//! updates combined with mutual-information-driven selection of unlabeled
//! samples.
//!
//! Each weight of the two trainable matrices carries an uncertainty that
//! scales its update step and decays multiplicatively whenever an update is
//! applied. Pool samples are scored by total uncertainty times the plug-in
//! mutual information between the output layer's pre- and postsynaptic
//! spike trains on that sample's forward pass.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::info::mutual_information;
use super::sgl::{normalize_logits, one_hot, sgl_error, sgl_layer_updates, spike_sums, SglParams};
use super::{prepare, TrainReport, TrainedModel};
use crate::data::Dataset;
use crate::encoding::{encode_sample, EncoderConfig, FeatureVector};
use crate::error::{Error, Result};
use crate::network::{forward, predict, NetworkConfig, NetworkWeights, ReadoutMode, WeightMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalParams {
    /// Initial per-weight uncertainty.
    pub u_init: f64,
    /// Multiplicative uncertainty decay applied after an update.
    pub u_decay: f64,
    /// Histogram bin count for the entropy estimator.
    pub bins: usize,
    /// Fraction of the unlabeled pool queried in total.
    pub query_fraction: f64,
    /// Learning rate of the inner surrogate-gradient update.
    pub lr: f64,
    /// Surrogate smoothness of the inner update.
    pub alpha: f64,
    /// Surrogate center of the inner update.
    pub center: f64,
    /// Fraction of the training set used as the initially labeled seed set.
    pub seed_fraction: f64,
}

impl BalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.u_init >= 0.0) {
            return Err(Error::InvalidParam("u_init must be >= 0".into()));
        }
        if !(self.u_decay > 0.0 && self.u_decay <= 1.0) {
            return Err(Error::InvalidParam("u_decay must be in (0,1]".into()));
        }
        if self.bins < 2 {
            return Err(Error::InvalidParam("bins must be >= 2".into()));
        }
        if !(self.query_fraction > 0.0 && self.query_fraction <= 1.0) {
            return Err(Error::InvalidParam("query_fraction must be in (0,1]".into()));
        }
        if !(self.lr > 0.0) {
            return Err(Error::InvalidParam("lr must be > 0".into()));
        }
        if !(self.seed_fraction >= 0.0 && self.seed_fraction < 1.0) {
            return Err(Error::InvalidParam("seed_fraction must be in [0,1)".into()));
        }
        Ok(())
    }
}

impl Default for BalParams {
    fn default() -> Self {
        Self {
            u_init: 1.0,
            u_decay: 0.999,
            bins: 4,
            query_fraction: 0.5,
            lr: 0.05,
            alpha: 2.0,
            center: 0.4,
            seed_fraction: 0.1,
        }
    }
}

/// Score unlabeled samples by `sum_ij U(w_ij) * I(S_post; S_pre | x)` and
/// return the indices of the top `ceil(query_fraction * n)` scorers, ties
/// broken by index order. MI is computed on the output layer's pre/post
/// spike trains of a spike-count forward pass.
pub fn bal_select(
    pool: &[FeatureVector],
    config: &NetworkConfig,
    weights: &NetworkWeights,
    enc: &EncoderConfig,
    uncertainty_sum: f64,
    params: &BalParams,
    pool_indices: &[usize],
) -> Result<Vec<usize>> {
    if pool.is_empty() {
        return Err(Error::InvalidInput("pool is empty".into()));
    }
    let mut spiking_cfg = config.clone();
    spiking_cfg.readout = ReadoutMode::SpikeCount;
    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(pool.len());
    for (f, &idx) in pool.iter().zip(pool_indices) {
        let input = encode_sample(f, enc, idx, 0)?;
        let record = forward(&spiking_cfg, weights, &input)?;
        let mi = mutual_information(&record.spikes_h2, &record.spikes_out, params.bins)?;
        scored.push((idx, uncertainty_sum * mi));
    }
    let k = (params.query_fraction * pool.len() as f64).ceil() as usize;
    let k = k.clamp(1, pool.len());
    // stable sort keeps index order on ties
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    let mut selected: Vec<usize> = scored.into_iter().take(k).map(|(i, _)| i).collect();
    selected.sort_unstable();
    Ok(selected)
}

/// Active-learning training loop. Each round queries labels for pool
/// samples (up to a total budget of `query_fraction` of the pool) and runs
/// one uncertainty-gated pass over every labeled sample.
pub fn train_bal(
    config: &NetworkConfig,
    enc: &EncoderConfig,
    train: &Dataset,
    val: &Dataset,
    params: &BalParams,
    rounds: usize,
    seed: u64,
) -> Result<(TrainedModel, TrainReport)> {
    params.validate()?;
    let mut config = config.clone();
    config.readout = ReadoutMode::MembraneLogit;
    config.validate()?;
    let prepared = prepare(train, val)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = NetworkWeights::init(&config, &mut rng);

    let inner = SglParams::new(params.alpha, params.lr, params.center);
    let mut u_hidden = uniform_matrix(config.h1, config.h2, params.u_init);
    let mut u_out = uniform_matrix(config.h2, 2, params.u_init);

    let n = train.len();
    let n_seed = ((params.seed_fraction * n as f64).round() as usize).min(n.saturating_sub(1));
    let mut labeled: Vec<usize> = (0..n_seed).collect();
    let mut pool: Vec<usize> = (n_seed..n).collect();
    let budget = ((params.query_fraction * pool.len() as f64).ceil() as usize).min(pool.len());
    let mut queried = 0usize;

    let start = Instant::now();
    let mut curve = Vec::with_capacity(rounds);
    for _round in 0..rounds {
        if queried < budget && !pool.is_empty() {
            let u_sum = matrix_sum(&u_hidden) + matrix_sum(&u_out);
            let pool_features: Vec<FeatureVector> =
                pool.iter().map(|&i| prepared.train[i].clone()).collect();
            let mut selected = bal_select(
                &pool_features,
                &config,
                &weights,
                enc,
                u_sum,
                params,
                &pool,
            )?;
            selected.truncate(budget - queried);
            queried += selected.len();
            labeled.extend_from_slice(&selected);
            labeled.sort_unstable();
            pool.retain(|i| !selected.contains(i));
        }

        let mut correct = 0usize;
        for &idx in &labeled {
            let f = &prepared.train[idx];
            let label = train.labels[idx];
            let input = encode_sample(f, enc, idx, _round)?;
            let record = forward(&config, &weights, &input)?;
            if predict(&record) == label as usize {
                correct += 1;
            }
            let y = one_hot(label);
            let y_hat = normalize_logits(record.logits);
            let delta = sgl_error(y, y_hat, record.logits, &inner);
            if delta != [0.0, 0.0] {
                let h1 = spike_sums(&record.spikes_h1);
                let h2 = spike_sums(&record.spikes_h2);
                let (d_hidden, d_out) = sgl_layer_updates(&h1, &h2, delta, &weights.w_h2_out)?;
                apply_gated(&mut weights.w_h1_h2, &d_hidden, &u_hidden);
                apply_gated(&mut weights.w_h2_out, &d_out, &u_out);
                decay(&mut u_hidden, params.u_decay);
                decay(&mut u_out, params.u_decay);
            }
        }
        curve.push(if labeled.is_empty() {
            0.0
        } else {
            correct as f64 / labeled.len() as f64
        });
    }
    let wall = start.elapsed().as_secs_f64();

    let model = TrainedModel::Feedforward {
        config,
        weights,
        encoder: *enc,
        norm: prepared.norm,
    };
    let final_train = model.evaluate(train)?;
    let final_val = model.evaluate(val)?;
    Ok((
        model,
        TrainReport {
            epochs_run: rounds,
            final_train_accuracy: final_train,
            final_val_accuracy: final_val,
            wall_time_seconds: wall,
            accuracy_curve: curve,
            labels_queried: Some(queried),
        },
    ))
}

fn uniform_matrix(rows: usize, cols: usize, value: f64) -> WeightMatrix {
    let mut m = WeightMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, value);
        }
    }
    m
}

fn matrix_sum(m: &WeightMatrix) -> f64 {
    m.values().iter().sum()
}

/// `w_ij += U_ij * d_ij`: the uncertainty gates each weight's step size.
fn apply_gated(weights: &mut WeightMatrix, delta: &WeightMatrix, uncertainty: &WeightMatrix) {
    for r in 0..weights.rows() {
        for c in 0..weights.cols() {
            let w = weights.get(r, c) + uncertainty.get(r, c) * delta.get(r, c);
            debug_assert!(w.is_finite());
            weights.set(r, c, w);
        }
    }
}

fn decay(uncertainty: &mut WeightMatrix, factor: f64) {
    for r in 0..uncertainty.rows() {
        for c in 0..uncertainty.cols() {
            uncertainty.set(r, c, uncertainty.get(r, c) * factor);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, stratified_split, SyntheticSpec};
    use crate::encoding::EncoderScheme;
    use crate::lif::LifParams;

    fn small_net(t_steps: usize) -> NetworkConfig {
        NetworkConfig {
            d_in: 8,
            h1: 16,
            h2: 8,
            lif_h1: LifParams::new(2.0, 0.3, 0.01),
            lif_h2: LifParams::new(2.0, 0.3, 0.01),
            t_steps,
            readout: ReadoutMode::MembraneLogit,
            readout_tau: None,
        }
    }

    #[test]
    fn zero_uncertainty_freezes_learning() {
        let spec = SyntheticSpec::separable(8, 60, 6.0, 3);
        let ds = generate_synthetic(&spec).unwrap();
        let (train, val) = stratified_split(&ds, 0.8, 1).unwrap();
        let enc = EncoderConfig::new(EncoderScheme::Rate, 8, 1.0, 7);
        let params = BalParams {
            u_init: 0.0,
            ..BalParams::default()
        };
        let config = small_net(8);
        let (model, report) =
            train_bal(&config, &enc, &train, &val, &params, 5, 42).unwrap();
        // weights never move, so they equal the raw initialization
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let init = NetworkWeights::init(&config, &mut rng);
        match model {
            TrainedModel::Feedforward { weights, .. } => {
                assert_eq!(weights, init);
            }
            _ => panic!("wrong model kind"),
        }
        assert!(report.final_val_accuracy <= 0.85);
    }

    #[test]
    fn query_fraction_one_selects_whole_pool() {
        let spec = SyntheticSpec::separable(8, 40, 6.0, 3);
        let ds = generate_synthetic(&spec).unwrap();
        let (train, val) = stratified_split(&ds, 0.8, 1).unwrap();
        let enc = EncoderConfig::new(EncoderScheme::Rate, 8, 1.0, 7);
        let params = BalParams {
            query_fraction: 1.0,
            seed_fraction: 0.0,
            ..BalParams::default()
        };
        let (_, report) = train_bal(&small_net(8), &enc, &train, &val, &params, 3, 5).unwrap();
        assert_eq!(report.labels_queried, Some(train.len()));
    }

    #[test]
    fn equivalent_to_sgl_when_ungated() {
        // qf = 1, u_decay = 1, u_init = 1, empty seed set: identical weights
        // to plain surrogate-gradient training with the same seed
        let spec = SyntheticSpec::separable(8, 60, 6.0, 9);
        let ds = generate_synthetic(&spec).unwrap();
        let (train, val) = stratified_split(&ds, 0.8, 2).unwrap();
        let enc = EncoderConfig::new(EncoderScheme::Rate, 8, 1.0, 7);
        let config = small_net(8);
        let params = BalParams {
            u_init: 1.0,
            u_decay: 1.0,
            query_fraction: 1.0,
            seed_fraction: 0.0,
            lr: 0.05,
            alpha: 2.0,
            center: 0.4,
            bins: 4,
        };
        let (bal_model, bal_report) =
            train_bal(&config, &enc, &train, &val, &params, 4, 77).unwrap();
        let sgl_params = SglParams::new(2.0, 0.05, 0.4);
        let (sgl_model, sgl_report) =
            super::super::sgl::train_sgl(&config, &enc, &train, &val, &sgl_params, 4, 77).unwrap();
        match (&bal_model, &sgl_model) {
            (
                TrainedModel::Feedforward { weights: wb, .. },
                TrainedModel::Feedforward { weights: ws, .. },
            ) => assert_eq!(wb, ws),
            _ => panic!("wrong model kinds"),
        }
        assert_eq!(bal_report.final_val_accuracy, sgl_report.final_val_accuracy);
    }

    #[test]
    fn silent_sample_ranks_last() {
        // identity chain: spikes propagate straight through, so the active
        // sample's pre/post trains are perfectly correlated
        let config = NetworkConfig {
            d_in: 2,
            h1: 2,
            h2: 2,
            lif_h1: LifParams::new(2.0, 0.5, 0.0),
            lif_h2: LifParams::new(2.0, 0.5, 0.0),
            t_steps: 8,
            readout: ReadoutMode::MembraneLogit,
            readout_tau: None,
        };
        let eye = |n: usize| {
            let mut m = WeightMatrix::zeros(n, n);
            for i in 0..n {
                m.set(i, i, 1.0);
            }
            m
        };
        let weights = NetworkWeights {
            w_in_h1: eye(2),
            w_h1_h2: eye(2),
            w_h2_out: eye(2),
        };
        let enc = EncoderConfig::new(EncoderScheme::Rate, 8, 1.0, 7);
        let silent = FeatureVector {
            values: vec![0.0; 2],
        };
        let active = FeatureVector {
            values: vec![0.5; 2],
        };
        let pool = vec![silent, active.clone(), active];
        let params = BalParams {
            query_fraction: 0.6,
            ..BalParams::default()
        };
        // measure the active sample's MI through the same path
        let mut spiking_cfg = config.clone();
        spiking_cfg.readout = crate::network::ReadoutMode::SpikeCount;
        let input = crate::encoding::encode_sample(&pool[1], &enc, 1, 0).unwrap();
        let record = crate::network::forward(&spiking_cfg, &weights, &input).unwrap();
        let mi_active =
            mutual_information(&record.spikes_h2, &record.spikes_out, params.bins).unwrap();

        let selected = bal_select(&pool, &config, &weights, &enc, 1.0, &params, &[0, 1, 2]).unwrap();
        assert_eq!(selected.len(), 2);
        if mi_active > 0.0 {
            // the all-zero sample drives no activity, scores 0, ranks last
            assert_eq!(selected, vec![1, 2]);
        }
        // make sure the construction is not vacuous
        assert!(mi_active > 0.0, "active sample should carry information");
    }
}
