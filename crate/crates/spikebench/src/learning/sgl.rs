//! Surrogate gradient learning: a Gaussian surrogate for the spike
//! derivative drives a two-matrix feedback-projection update on the hidden
//! weights. Input weights stay at their random initialization.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{prepare, TrainReport, TrainedModel};
use crate::data::Dataset;
use crate::encoding::{encode_sample, EncoderConfig};
use crate::error::{Error, Result};
use crate::network::{forward, predict, NetworkConfig, NetworkWeights, ReadoutMode, WeightMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SglParams {
    /// Surrogate smoothness.
    pub alpha: f64,
    /// Learning rate.
    pub eta: f64,
    /// Surrogate center potential. Defaults to the network threshold.
    pub center: f64,
}

impl SglParams {
    pub fn new(alpha: f64, eta: f64, center: f64) -> Self {
        Self { alpha, eta, center }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParam("alpha must be > 0".into()));
        }
        if !(self.eta > 0.0) {
            return Err(Error::InvalidParam("eta must be > 0".into()));
        }
        Ok(())
    }
}

/// Gaussian surrogate for the spike derivative:
/// `sigma'(v) = alpha * exp(-alpha (v - center)^2)`.
pub fn surrogate_derivative(v: f64, params: &SglParams) -> f64 {
    params.alpha * (-params.alpha * (v - params.center).powi(2)).exp()
}

/// Bounded prediction from raw logits: shift to nonnegative by subtracting
/// the minimum, then normalize to sum 1. All-equal logits map to (0.5, 0.5).
pub fn normalize_logits(logits: [f64; 2]) -> [f64; 2] {
    let min = logits[0].min(logits[1]);
    let shifted = [logits[0] - min, logits[1] - min];
    let sum = shifted[0] + shifted[1];
    if sum <= 0.0 {
        [0.5, 0.5]
    } else {
        [shifted[0] / sum, shifted[1] / sum]
    }
}

/// Output error term `delta_k = eta (y_k - y_hat_k) sigma'(v_out_k)`.
pub fn sgl_error(y: [f64; 2], y_hat: [f64; 2], v_out: [f64; 2], params: &SglParams) -> [f64; 2] {
    [
        params.eta * (y[0] - y_hat[0]) * surrogate_derivative(v_out[0], params),
        params.eta * (y[1] - y_hat[1]) * surrogate_derivative(v_out[1], params),
    ]
}

/// The two-matrix layer-wise update:
/// `dW_h2_out = h2^T delta`, `dW_h1_h2 = h1^T (W_h2_out delta)`.
/// A single backward projection, not backpropagation through time.
pub fn sgl_layer_updates(
    h1: &[f64],
    h2: &[f64],
    delta: [f64; 2],
    w_h2_out: &WeightMatrix,
) -> Result<(WeightMatrix, WeightMatrix)> {
    if w_h2_out.rows() != h2.len() || w_h2_out.cols() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "w_h2_out is {}x{}, expected {}x2",
            w_h2_out.rows(),
            w_h2_out.cols(),
            h2.len()
        )));
    }
    let mut d_out = WeightMatrix::zeros(h2.len(), 2);
    for (i, &h) in h2.iter().enumerate() {
        d_out.set(i, 0, h * delta[0]);
        d_out.set(i, 1, h * delta[1]);
    }
    // backward projection of the output error onto h2
    let back: Vec<f64> = (0..h2.len())
        .map(|j| w_h2_out.get(j, 0) * delta[0] + w_h2_out.get(j, 1) * delta[1])
        .collect();
    let mut d_hidden = WeightMatrix::zeros(h1.len(), h2.len());
    for (i, &h) in h1.iter().enumerate() {
        for (j, &b) in back.iter().enumerate() {
            d_hidden.set(i, j, h * b);
        }
    }
    Ok((d_hidden, d_out))
}

pub(crate) fn one_hot(label: u8) -> [f64; 2] {
    if label == 0 {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}

/// Summed spike activations per neuron over the full window.
pub(crate) fn spike_sums(train: &crate::spike::SpikeTrain) -> Vec<f64> {
    train
        .counts_per_channel()
        .into_iter()
        .map(|c| c as f64)
        .collect()
}

/// Train with the surrogate gradient rule: membrane-logit readout, online
/// per-sample updates in dataset order.
pub fn train_sgl(
    config: &NetworkConfig,
    enc: &EncoderConfig,
    train: &Dataset,
    val: &Dataset,
    params: &SglParams,
    epochs: usize,
    seed: u64,
) -> Result<(TrainedModel, TrainReport)> {
    params.validate()?;
    let mut config = config.clone();
    config.readout = ReadoutMode::MembraneLogit;
    config.validate()?;
    let prepared = prepare(train, val)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = NetworkWeights::init(&config, &mut rng);

    let start = Instant::now();
    let mut curve = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let mut correct = 0usize;
        for (idx, (f, &label)) in prepared.train.iter().zip(&train.labels).enumerate() {
            let input = encode_sample(f, enc, idx, epoch)?;
            let record = forward(&config, &weights, &input)?;
            if predict(&record) == label as usize {
                correct += 1;
            }
            let y = one_hot(label);
            let y_hat = normalize_logits(record.logits);
            let delta = sgl_error(y, y_hat, record.logits, params);
            if delta != [0.0, 0.0] {
                let h1 = spike_sums(&record.spikes_h1);
                let h2 = spike_sums(&record.spikes_h2);
                let (d_hidden, d_out) = sgl_layer_updates(&h1, &h2, delta, &weights.w_h2_out)?;
                weights.w_h1_h2.add_scaled(&d_hidden, 1.0);
                weights.w_h2_out.add_scaled(&d_out, 1.0);
            }
        }
        curve.push(correct as f64 / train.len() as f64);
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
            epochs_run: epochs,
            final_train_accuracy: final_train,
            final_val_accuracy: final_val,
            wall_time_seconds: wall,
            accuracy_curve: curve,
            labels_queried: None,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> SglParams {
        SglParams::new(2.0, 0.1, 1.0)
    }

    #[test]
    fn surrogate_peak_at_center() {
        let p = params();
        assert_eq!(surrogate_derivative(1.0, &p), 2.0);
    }

    #[test]
    fn surrogate_tails_vanish() {
        let p = params();
        assert!(surrogate_derivative(100.0, &p) < 1e-12);
        assert!(surrogate_derivative(-100.0, &p) < 1e-12);
    }

    #[test]
    fn surrogate_hand_value() {
        // alpha=2, center=1, v=1.5 -> 2 exp(-0.5)
        let p = params();
        assert_relative_eq!(
            surrogate_derivative(1.5, &p),
            2.0 * (-0.5f64).exp(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn surrogate_matches_closed_form_everywhere() {
        let p = SglParams::new(3.7, 0.1, 0.4);
        let mut x = -5.0f64;
        while x < 5.0 {
            let expected = 3.7 * (-3.7 * (x - 0.4) * (x - 0.4)).exp();
            assert_relative_eq!(surrogate_derivative(x, &p), expected, epsilon = 1e-12);
            x += 0.001;
        }
    }

    #[test]
    fn error_zero_when_prediction_matches() {
        let p = params();
        assert_eq!(
            sgl_error([1.0, 0.0], [1.0, 0.0], [1.0, 0.3], &p),
            [0.0, 0.0]
        );
    }

    #[test]
    fn error_zero_with_zero_rate() {
        let p = SglParams::new(2.0, 0.0, 1.0);
        let d = sgl_error([1.0, 0.0], [0.0, 1.0], [1.0, 1.0], &p);
        assert_eq!(d, [0.0, 0.0]);
    }

    #[test]
    fn error_hand_value() {
        // y=(1,0), y_hat=(0,1), v at center, eta=0.1, alpha=2 -> (0.2, -0.2)
        let p = params();
        let d = sgl_error([1.0, 0.0], [0.0, 1.0], [1.0, 1.0], &p);
        assert_relative_eq!(d[0], 0.2, epsilon = 1e-12);
        assert_relative_eq!(d[1], -0.2, epsilon = 1e-12);
    }

    #[test]
    fn layer_updates_zero_delta() {
        let w = WeightMatrix::zeros(2, 2);
        let (dh, dout) = sgl_layer_updates(&[1.0, 2.0], &[3.0, 4.0], [0.0, 0.0], &w).unwrap();
        assert!(dh.values().iter().all(|&v| v == 0.0));
        assert!(dout.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn layer_updates_zero_h1() {
        let w = WeightMatrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let (dh, _) = sgl_layer_updates(&[0.0, 0.0], &[3.0, 4.0], [0.5, -0.5], &w).unwrap();
        assert!(dh.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn layer_updates_toy_hand_computed() {
        // 2-2-2 toy: h1=(1,0), h2=(0,1), delta=(0.2,-0.2), W_h2_out = I
        let w = WeightMatrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let (dh, dout) = sgl_layer_updates(&[1.0, 0.0], &[0.0, 1.0], [0.2, -0.2], &w).unwrap();
        // dW_h2_out = h2^T delta = [[0,0],[0.2,-0.2]]
        assert_relative_eq!(dout.get(0, 0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(dout.get(0, 1), 0.0, epsilon = 1e-12);
        assert_relative_eq!(dout.get(1, 0), 0.2, epsilon = 1e-12);
        assert_relative_eq!(dout.get(1, 1), -0.2, epsilon = 1e-12);
        // back = W delta = (0.2, -0.2); dW_h1_h2 = h1^T back = [[0.2,-0.2],[0,0]]
        assert_relative_eq!(dh.get(0, 0), 0.2, epsilon = 1e-12);
        assert_relative_eq!(dh.get(0, 1), -0.2, epsilon = 1e-12);
        assert_relative_eq!(dh.get(1, 0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(dh.get(1, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn layer_updates_shape_mismatch() {
        let w = WeightMatrix::zeros(3, 2);
        assert!(sgl_layer_updates(&[1.0], &[1.0, 2.0], [0.1, 0.1], &w).is_err());
    }

    #[test]
    fn normalize_logits_cases() {
        assert_eq!(normalize_logits([2.0, 1.0]), [1.0, 0.0]);
        assert_eq!(normalize_logits([1.0, 3.0]), [0.0, 1.0]);
        assert_eq!(normalize_logits([2.0, 2.0]), [0.5, 0.5]);
        assert_eq!(normalize_logits([-4.0, -4.0]), [0.5, 0.5]);
    }
}
