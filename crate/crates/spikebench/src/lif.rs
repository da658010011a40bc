//! Discrete-time leaky integrate-and-fire dynamics.
//!
//! The membrane follows `tau_m dV/dt = -V + R_m I`, discretized with an
//! exponential-Euler step at dt = 1: `v <- exp(-1/tau_m) * v + r_m * i + bias`.
//! A neuron spikes when its updated potential reaches `v_th` (inclusive) and
//! is reset to `v_reset` before the next step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Membrane parameters shared by every neuron in a layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifParams {
    /// Membrane time constant in timesteps (dt = 1). Must exceed 1.
    pub tau_m: f64,
    /// Spike threshold.
    pub v_th: f64,
    /// Potential after a spike.
    pub v_reset: f64,
    /// Membrane resistance scaling the input current.
    pub r_m: f64,
    /// Constant additive current.
    pub bias: f64,
}

impl LifParams {
    pub fn new(tau_m: f64, v_th: f64, bias: f64) -> Self {
        Self {
            tau_m,
            v_th,
            v_reset: 0.0,
            r_m: 1.0,
            bias,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_m > 1.0) {
            return Err(Error::InvalidParam(format!(
                "tau_m must be > 1.0, got {}",
                self.tau_m
            )));
        }
        if !(self.v_th > self.v_reset) {
            return Err(Error::InvalidParam(format!(
                "v_th ({}) must exceed v_reset ({})",
                self.v_th, self.v_reset
            )));
        }
        if !(self.bias >= 0.0) {
            return Err(Error::InvalidParam(format!(
                "bias must be >= 0, got {}",
                self.bias
            )));
        }
        Ok(())
    }
}

impl Default for LifParams {
    fn default() -> Self {
        Self::new(2.0, 0.4, 0.0)
    }
}

/// Per-step membrane decay factor `exp(-1/tau_m)`, strictly inside (0, 1).
pub fn decay_factor(tau_m: f64) -> Result<f64> {
    if !(tau_m > 1.0) {
        return Err(Error::InvalidParam(format!(
            "tau_m must be > 1.0, got {tau_m}"
        )));
    }
    Ok((-1.0 / tau_m).exp())
}

/// Membrane potentials of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerState {
    pub v: Vec<f64>,
}

impl LayerState {
    pub fn zeros(n: usize) -> Self {
        Self { v: vec![0.0; n] }
    }
}

/// One simulation step for a layer of LIF neurons.
///
/// Returns the binary spike vector. Spiking neurons are reset to `v_reset`
/// so the recorded trace holds the pre-reset potential while the state
/// carries the reset into the next step.
pub fn lif_step(state: &mut LayerState, input_current: &[f64], params: &LifParams) -> Vec<u8> {
    debug_assert_eq!(state.v.len(), input_current.len());
    let decay = decay_factor(params.tau_m).expect("validated params");
    let mut spikes = vec![0u8; state.v.len()];
    for (i, v) in state.v.iter_mut().enumerate() {
        let v_new = decay * *v + params.r_m * input_current[i] + params.bias;
        if v_new >= params.v_th {
            spikes[i] = 1;
            *v = params.v_reset;
        } else {
            *v = v_new;
        }
    }
    spikes
}

/// One step for a non-spiking integrator layer (membrane-logit readout).
/// Same leak and drive as `lif_step` but no threshold and no reset.
pub fn integrate_step(state: &mut LayerState, input_current: &[f64], params: &LifParams) {
    debug_assert_eq!(state.v.len(), input_current.len());
    let decay = decay_factor(params.tau_m).expect("validated params");
    for (i, v) in state.v.iter_mut().enumerate() {
        *v = decay * *v + params.r_m * input_current[i] + params.bias;
    }
}

/// Pre-reset membrane value for trace recording: what `lif_step` computed
/// before applying the reset.
pub fn membrane_update(v: f64, input_current: f64, params: &LifParams) -> f64 {
    let decay = decay_factor(params.tau_m).expect("validated params");
    decay * v + params.r_m * input_current + params.bias
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn decay_factor_matches_exp() {
        // independent values: exp(-0.5) and exp(-1/1.1) from any calculator
        assert_relative_eq!(decay_factor(2.0).unwrap(), 0.6065306597126334, epsilon = 1e-12);
        assert_relative_eq!(
            decay_factor(1.1).unwrap(),
            (-1.0_f64 / 1.1).exp(),
            epsilon = 1e-15
        );
        assert!((decay_factor(1.1).unwrap() - 0.40289).abs() < 1e-5);
    }

    #[test]
    fn decay_factor_limit_toward_one() {
        // perfect integrator in the tau -> infinity limit
        assert!(decay_factor(1e12).unwrap() > 1.0 - 1e-11);
        assert!(decay_factor(1e12).unwrap() < 1.0);
    }

    #[test]
    fn decay_factor_rejects_small_tau() {
        assert!(decay_factor(1.0).is_err());
        assert!(decay_factor(0.5).is_err());
        assert!(decay_factor(-3.0).is_err());
    }

    #[test]
    fn zero_input_zero_bias_is_fixed_point() {
        let params = LifParams::new(2.0, 0.5, 0.0);
        let mut state = LayerState::zeros(3);
        let spikes = lif_step(&mut state, &[0.0, 0.0, 0.0], &params);
        assert_eq!(spikes, vec![0, 0, 0]);
        assert_eq!(state.v, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn potential_at_threshold_decays_below() {
        // v = v_th = 0.5, tau = 2: v' = 0.5 * exp(-0.5) < 0.5, so no spike
        let params = LifParams::new(2.0, 0.5, 0.0);
        let mut state = LayerState { v: vec![0.5] };
        let spikes = lif_step(&mut state, &[0.0], &params);
        assert_eq!(spikes, vec![0]);
        assert_relative_eq!(state.v[0], 0.5 * 0.6065306597126334, epsilon = 1e-12);
    }

    #[test]
    fn suprathreshold_input_spikes_and_resets() {
        let params = LifParams::new(2.0, 0.5, 0.0);
        let mut state = LayerState::zeros(1);
        let spikes = lif_step(&mut state, &[0.5 + 1e-9], &params);
        assert_eq!(spikes, vec![1]);
        assert_eq!(state.v[0], params.v_reset);
    }

    #[test]
    fn inclusive_threshold() {
        let params = LifParams::new(2.0, 0.5, 0.0);
        let mut state = LayerState::zeros(1);
        let spikes = lif_step(&mut state, &[0.5], &params);
        assert_eq!(spikes, vec![1]);
    }

    #[test]
    fn zero_input_decay_matches_closed_form() {
        let params = LifParams::new(2.5, 10.0, 0.0);
        let v0 = 1.0;
        let mut state = LayerState { v: vec![v0] };
        for t in 1..=100 {
            lif_step(&mut state, &[0.0], &params);
            let expected = v0 * (-(t as f64) / params.tau_m).exp();
            assert_relative_eq!(state.v[0], expected, epsilon = 1e-12);
        }
    }
}
