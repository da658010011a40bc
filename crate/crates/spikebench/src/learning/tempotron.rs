//! Tempotron rule: kernel-weighted, error-driven updates at the time of
//! peak potential.
//!
//! The rule trains single readout units. The hidden layers act as a frozen
//! random temporal projection; one unit per class is trained one-vs-rest on
//! the second hidden layer's spike trains, and prediction goes to the unit
//! with the higher peak potential.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{prepare, TrainReport, TrainedModel};
use crate::data::Dataset;
use crate::encoding::{encode_sample, EncoderConfig};
use crate::error::{Error, Result};
use crate::network::{forward_hidden, NetworkConfig, WeightMatrix};
use crate::spike::SpikeTrain;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TempotronParams {
    /// Kernel membrane time constant.
    pub tau_m: f64,
    /// Kernel synaptic time constant; must be smaller than `tau_m`.
    pub tau_s: f64,
    /// Learning rate magnitude.
    pub lambda_lr: f64,
    /// Integration horizon in timesteps; potentials are evaluated on the
    /// grid 0..=t_window.
    pub t_window: usize,
    /// Firing threshold of the readout units.
    pub v_th: f64,
}

impl TempotronParams {
    pub fn new(tau_m: f64, lambda_lr: f64, t_window: usize, v_th: f64) -> Self {
        // classic tau_s = tau_m / 4 ratio
        Self {
            tau_m,
            tau_s: tau_m / 4.0,
            lambda_lr,
            t_window,
            v_th,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_m > self.tau_s && self.tau_s > 0.0) {
            return Err(Error::InvalidParam(format!(
                "need tau_m > tau_s > 0, got tau_m={} tau_s={}",
                self.tau_m, self.tau_s
            )));
        }
        if !(self.lambda_lr > 0.0) {
            return Err(Error::InvalidParam("lambda_lr must be > 0".into()));
        }
        Ok(())
    }
}

/// Unit-peak PSP kernel `K(dt) = V0 (exp(-dt/tau_m) - exp(-dt/tau_s))` for
/// dt >= 0, zero for dt < 0. `V0` is the analytic normalization making the
/// peak exactly 1 at `t* = tau_m tau_s / (tau_m - tau_s) * ln(tau_m/tau_s)`.
pub fn psp_kernel(dt: f64, tau_m: f64, tau_s: f64) -> Result<f64> {
    if !(tau_m > tau_s && tau_s > 0.0) {
        return Err(Error::InvalidParam(format!(
            "need tau_m > tau_s > 0, got tau_m={tau_m} tau_s={tau_s}"
        )));
    }
    if dt < 0.0 {
        return Ok(0.0);
    }
    let v0 = 1.0 / {
        let t_star = kernel_peak_time(tau_m, tau_s);
        (-t_star / tau_m).exp() - (-t_star / tau_s).exp()
    };
    Ok(v0 * ((-dt / tau_m).exp() - (-dt / tau_s).exp()))
}

/// Time of the kernel's analytic maximum.
pub fn kernel_peak_time(tau_m: f64, tau_s: f64) -> f64 {
    tau_m * tau_s / (tau_m - tau_s) * (tau_m / tau_s).ln()
}

/// Membrane potential of one readout unit at time `t`:
/// `v(t) = sum_i w_i sum_{t_i <= t} K(t - t_i)` with V_rest = 0.
pub fn tempotron_potential(
    weights: &[f64],
    spike_times: &[Vec<usize>],
    params: &TempotronParams,
    t: f64,
) -> f64 {
    debug_assert_eq!(weights.len(), spike_times.len());
    let mut v = 0.0;
    for (w, times) in weights.iter().zip(spike_times) {
        for &ti in times {
            let dt = t - ti as f64;
            if dt >= 0.0 {
                v += w * psp_kernel(dt, params.tau_m, params.tau_s).expect("validated params");
            }
        }
    }
    v
}

/// Argmax of the potential over the grid `{0, 1, ..., t_window}`; earliest
/// index wins ties. An input without spikes yields a flat potential and
/// t_max = 0.
pub fn tempotron_t_max(
    weights: &[f64],
    spike_times: &[Vec<usize>],
    params: &TempotronParams,
) -> usize {
    let mut best_t = 0;
    let mut best_v = f64::NEG_INFINITY;
    for t in 0..=params.t_window {
        let v = tempotron_potential(weights, spike_times, params, t as f64);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    best_t
}

/// Error-driven weight delta. Zero on a correct classification; on a miss
/// (`should_fire` but `!fired`) each channel gains
/// `+lambda sum_{t_i < t_max} K(t_max - t_i)`; on a false alarm the same
/// magnitude with negative sign.
pub fn tempotron_update(
    weights: &[f64],
    spike_times: &[Vec<usize>],
    should_fire: bool,
    fired: bool,
    params: &TempotronParams,
) -> Vec<f64> {
    let n = weights.len();
    if should_fire == fired {
        return vec![0.0; n];
    }
    let t_max = tempotron_t_max(weights, spike_times, params) as f64;
    let sign = if should_fire { 1.0 } else { -1.0 };
    spike_times
        .iter()
        .map(|times| {
            let s: f64 = times
                .iter()
                .filter(|&&ti| (ti as f64) < t_max)
                .map(|&ti| {
                    psp_kernel(t_max - ti as f64, params.tau_m, params.tau_s)
                        .expect("validated params")
                })
                .sum();
            sign * params.lambda_lr * s
        })
        .collect()
}

/// Kernel-sum matrix: `A[t][c] = sum_{t_i <= t} K(t - t_i)` for channel c.
/// Lets unit potentials be evaluated as dot products per grid point.
fn kernel_sums(spike_times: &[Vec<usize>], params: &TempotronParams) -> Vec<Vec<f64>> {
    let channels = spike_times.len();
    let mut table = vec![0.0; params.t_window + 1];
    for (dt, slot) in table.iter_mut().enumerate() {
        *slot = psp_kernel(dt as f64, params.tau_m, params.tau_s).expect("validated params");
    }
    let mut a = vec![vec![0.0; channels]; params.t_window + 1];
    for (c, times) in spike_times.iter().enumerate() {
        for &ti in times {
            for t in ti..=params.t_window {
                a[t][c] += table[t - ti];
            }
        }
    }
    a
}

fn unit_peak(weights: &[f64], kernel_sums: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0usize, f64::NEG_INFINITY);
    for (t, row) in kernel_sums.iter().enumerate() {
        let v: f64 = weights.iter().zip(row).map(|(w, a)| w * a).sum();
        if v > best.1 {
            best = (t, v);
        }
    }
    best
}

/// Train two one-vs-rest tempotron units on top of frozen random hidden
/// layers.
pub fn train_tempotron(
    config: &NetworkConfig,
    enc: &EncoderConfig,
    train: &Dataset,
    val: &Dataset,
    params: &TempotronParams,
    epochs: usize,
    seed: u64,
) -> Result<(TrainedModel, TrainReport)> {
    params.validate()?;
    config.validate()?;
    let prepared = prepare(train, val)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w_in_h1 = WeightMatrix::init_uniform(config.d_in, config.h1, &mut rng);
    let w_h1_h2 = WeightMatrix::init_uniform(config.h1, config.h2, &mut rng);
    // both units start from the same draw so a label flip maps one unit's
    // trajectory exactly onto the other's
    let mut units: [Vec<f64>; 2] = {
        let bound = 1.0 / (config.h2 as f64).sqrt();
        let shared: Vec<f64> = (0..config.h2)
            .map(|_| rand::Rng::gen_range(&mut rng, -bound..=bound))
            .collect();
        [shared.clone(), shared]
    };

    // hidden layers are frozen, so each sample's h2 spike times are fixed
    // when the encoder does not reseed per epoch
    let encode_h2 = |f: &crate::encoding::FeatureVector,
                     idx: usize,
                     epoch: usize|
     -> Result<SpikeTrain> {
        let input = encode_sample(f, enc, idx, epoch)?;
        let (_, h2) = forward_hidden(config, &w_in_h1, &w_h1_h2, &input)?;
        Ok(h2)
    };

    let start = Instant::now();
    let mut curve = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let mut correct = 0usize;
        for (idx, (f, &label)) in prepared.train.iter().zip(&train.labels).enumerate() {
            let h2 = encode_h2(f, idx, epoch)?;
            let times = h2.spike_times();
            let sums = kernel_sums(&times, params);
            let mut peaks = [0.0f64; 2];
            let mut t_maxes = [0usize; 2];
            for (u, w) in units.iter().enumerate() {
                let (t, v) = unit_peak(w, &sums);
                t_maxes[u] = t;
                peaks[u] = v;
            }
            let predicted = if peaks[1] > peaks[0] { 1 } else { 0 };
            if predicted == label as usize {
                correct += 1;
            }
            for u in 0..2 {
                let should_fire = u == label as usize;
                let fired = peaks[u] >= params.v_th;
                if should_fire != fired {
                    let sign = if should_fire { 1.0 } else { -1.0 };
                    let contrib = &sums[t_maxes[u]];
                    for (w, a) in units[u].iter_mut().zip(contrib) {
                        *w += sign * params.lambda_lr * a;
                        debug_assert!(w.is_finite());
                    }
                }
            }
        }
        curve.push(correct as f64 / train.len() as f64);
    }
    let wall = start.elapsed().as_secs_f64();

    let model = TrainedModel::Tempotron {
        config: config.clone(),
        w_in_h1,
        w_h1_h2,
        unit_weights: units,
        params: *params,
        encoder: *enc,
        norm: prepared.norm,
    };
    let final_train = model.evaluate(train)?;
    let final_val = model.evaluate(val)?;
    let report = TrainReport {
        epochs_run: epochs,
        final_train_accuracy: final_train,
        final_val_accuracy: final_val,
        wall_time_seconds: wall,
        accuracy_curve: curve,
        labels_queried: None,
    };
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> TempotronParams {
        TempotronParams::new(4.0, 0.05, 20, 1.0)
    }

    #[test]
    fn kernel_zero_at_origin_and_before() {
        let p = params();
        assert_eq!(psp_kernel(0.0, p.tau_m, p.tau_s).unwrap(), 0.0);
        assert_eq!(psp_kernel(-1.0, p.tau_m, p.tau_s).unwrap(), 0.0);
    }

    #[test]
    fn kernel_peak_is_one() {
        let p = params();
        let t_star = kernel_peak_time(p.tau_m, p.tau_s);
        assert_relative_eq!(
            psp_kernel(t_star, p.tau_m, p.tau_s).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn kernel_grid_max_equals_one() {
        // brute-force maximization oracle: grid over [0, 20] step 1e-4
        let (tau_m, tau_s) = (4.0, 1.0);
        let mut max = f64::NEG_INFINITY;
        let mut dt = 0.0;
        while dt <= 20.0 {
            max = max.max(psp_kernel(dt, tau_m, tau_s).unwrap());
            dt += 1e-4;
        }
        assert!((max - 1.0).abs() < 1e-6, "grid max = {max}");
    }

    #[test]
    fn kernel_nonnegative() {
        for i in 0..200 {
            let dt = i as f64 * 0.1;
            assert!(psp_kernel(dt, 2.5, 0.7).unwrap() >= 0.0);
        }
    }

    #[test]
    fn kernel_rejects_bad_constants() {
        assert!(psp_kernel(1.0, 1.0, 1.0).is_err());
        assert!(psp_kernel(1.0, 1.0, 2.0).is_err());
        assert!(psp_kernel(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn potential_no_spikes_is_zero() {
        let p = params();
        let times: Vec<Vec<usize>> = vec![vec![], vec![]];
        for t in 0..=20 {
            assert_eq!(tempotron_potential(&[1.0, -2.0], &times, &p, t as f64), 0.0);
        }
    }

    #[test]
    fn potential_single_spike_is_scaled_kernel() {
        let p = params();
        let times = vec![vec![3usize]];
        for t in 0..=20 {
            let expected = 0.7 * psp_kernel(t as f64 - 3.0, p.tau_m, p.tau_s).unwrap();
            assert_relative_eq!(
                tempotron_potential(&[0.7], &times, &p, t as f64),
                expected,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn potential_matches_direct_summation() {
        // two spikes on one channel vs an independently coded double sum
        let p = params();
        let times = vec![vec![2usize, 5], vec![1]];
        let w = [0.4, -0.3];
        let mut rng_t = 0.37;
        for _ in 0..100 {
            rng_t = (rng_t * 16807.0) % 20.0; // crude but deterministic t values
            let t = rng_t;
            let mut expected = 0.0;
            for (wi, ch) in w.iter().zip(&times) {
                for &ti in ch {
                    if t >= ti as f64 {
                        expected += wi * psp_kernel(t - ti as f64, p.tau_m, p.tau_s).unwrap();
                    }
                }
            }
            assert_relative_eq!(
                tempotron_potential(&w, &times, &p, t),
                expected,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn t_max_single_spike_near_peak_time() {
        let p = params();
        let times = vec![vec![3usize]];
        let t_max = tempotron_t_max(&[1.0], &times, &p);
        let expected = 3.0 + kernel_peak_time(p.tau_m, p.tau_s);
        // grid argmax is the closest integer to the analytic peak
        assert!((t_max as f64 - expected).abs() <= 0.5 + 1e-9);
    }

    #[test]
    fn t_max_flat_potential_ties_to_zero() {
        let p = params();
        let times = vec![vec![2usize, 7]];
        assert_eq!(tempotron_t_max(&[0.0], &times, &p), 0);
        assert_eq!(tempotron_t_max(&[1.0], &[vec![]], &p), 0);
    }

    #[test]
    fn negated_weights_flip_argmax_to_argmin() {
        let p = params();
        let times = vec![vec![2usize], vec![5, 9]];
        let w = [0.8, 0.5];
        let neg: Vec<f64> = w.iter().map(|x| -x).collect();
        let t_neg = tempotron_t_max(&neg, &times, &p);
        // argmax of -v is an argmin of v
        let mut min_v = f64::INFINITY;
        let mut t_min = 0;
        for t in 0..=p.t_window {
            let v = tempotron_potential(&w, &times, &p, t as f64);
            if v < min_v {
                min_v = v;
                t_min = t;
            }
        }
        assert_eq!(t_neg, t_min);
    }

    #[test]
    fn update_zero_when_correct() {
        let p = params();
        let times = vec![vec![2usize], vec![4]];
        let w = [0.5, 0.5];
        assert_eq!(tempotron_update(&w, &times, true, true, &p), vec![0.0, 0.0]);
        assert_eq!(tempotron_update(&w, &times, false, false, &p), vec![0.0, 0.0]);
    }

    #[test]
    fn update_single_spike_hand_value() {
        let p = params();
        let times = vec![vec![2usize], vec![]];
        let w = [0.3, 0.1];
        let t_max = tempotron_t_max(&w, &times, &p) as f64;
        let delta = tempotron_update(&w, &times, true, false, &p);
        let expected = p.lambda_lr * psp_kernel(t_max - 2.0, p.tau_m, p.tau_s).unwrap();
        assert_relative_eq!(delta[0], expected, epsilon = 1e-12);
        assert_eq!(delta[1], 0.0);
    }

    #[test]
    fn spikes_at_or_after_t_max_contribute_nothing() {
        let p = params();
        // negative weight pushes t_max to 0, so the spike at 5 is after it
        let times = vec![vec![5usize]];
        let w = [-1.0];
        let t_max = tempotron_t_max(&w, &times, &p);
        assert!(t_max <= 5);
        let delta = tempotron_update(&w, &times, true, false, &p);
        if t_max <= 5 {
            // all spikes with t_i >= t_max contribute zero
            let expected: f64 = times[0]
                .iter()
                .filter(|&&ti| ti < t_max)
                .map(|&ti| {
                    p.lambda_lr * psp_kernel((t_max - ti) as f64, p.tau_m, p.tau_s).unwrap()
                })
                .sum();
            assert_relative_eq!(delta[0], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn scale_covariance() {
        let p = params();
        let times = vec![vec![2usize, 6], vec![4]];
        let w = [0.8, -0.2];
        let scaled: Vec<f64> = w.iter().map(|x| 3.0 * x).collect();
        for t in 0..=p.t_window {
            let v = tempotron_potential(&w, &times, &p, t as f64);
            let vs = tempotron_potential(&scaled, &times, &p, t as f64);
            assert_relative_eq!(vs, 3.0 * v, epsilon = 1e-12);
        }
        assert_eq!(
            tempotron_t_max(&w, &times, &p),
            tempotron_t_max(&scaled, &times, &p)
        );
    }
}
