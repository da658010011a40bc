//! Glue between sampled hyperparameters and the three trainers.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::encoding::{EncoderConfig, EncoderScheme};
use crate::error::{Error, Result};
use crate::hpo::TrialParams;
use crate::learning::{
    train_bal, train_sgl, train_tempotron, BalParams, SglParams, TempotronParams, TrainReport,
    TrainedModel,
};
use crate::lif::LifParams;
use crate::network::{NetworkConfig, ReadoutMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Sgl,
    Tempotron,
    Bal,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Sgl, Rule::Tempotron, Rule::Bal];

    pub fn name(&self) -> &'static str {
        match self {
            Rule::Sgl => "sgl",
            Rule::Tempotron => "tempotron",
            Rule::Bal => "bal",
        }
    }
}

impl std::str::FromStr for Rule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sgl" => Ok(Rule::Sgl),
            "tempotron" => Ok(Rule::Tempotron),
            "bal" => Ok(Rule::Bal),
            other => Err(Error::InvalidParam(format!(
                "unknown rule '{other}' (expected sgl, tempotron, or bal)"
            ))),
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Readout integrator time constant; large enough that the leak over any
/// window in the supported range is negligible.
pub const READOUT_TAU: f64 = 1e6;

/// Firing threshold of the tempotron output units.
pub const TEMPOTRON_V_TH: f64 = 1.5;

/// Network and encoder configs for one hyperparameter assignment.
pub fn build_configs(p: &TrialParams, d_in: usize) -> (NetworkConfig, EncoderConfig) {
    let lif = LifParams::new(p.tau_m, p.v_th, p.bias);
    let net = NetworkConfig {
        d_in,
        h1: p.h1,
        h2: p.h2,
        lif_h1: lif,
        lif_h2: lif,
        t_steps: p.t_steps,
        readout: ReadoutMode::MembraneLogit,
        // Effectively non-leaky readout integrator: the final membrane then
        // sums synaptic current over the whole window, matching the
        // spike-count activations the updates are computed from.
        readout_tau: Some(READOUT_TAU),
    };
    let enc = EncoderConfig::new(p.scheme, p.t_steps, p.gain, p.seed);
    (net, enc)
}

/// Train one rule end-to-end from a sampled assignment.
pub fn train_rule(
    rule: Rule,
    p: &TrialParams,
    train: &Dataset,
    val: &Dataset,
    epochs: usize,
) -> Result<(TrainedModel, TrainReport)> {
    let (net, enc) = build_configs(p, train.dim());
    match rule {
        Rule::Sgl => {
            // surrogate centered at the threshold (1.0 also valid; see SglParams)
            let params = SglParams::new(p.alpha, p.eta, p.v_th);
            train_sgl(&net, &enc, train, val, &params, epochs, p.seed)
        }
        Rule::Tempotron => {
            // The tempotron units integrate PSPs from the whole h2 layer, so
            // their firing threshold lives on a larger scale than the LIF one.
            let mut params = TempotronParams::new(p.tau_m, p.lambda_lr, p.t_steps, TEMPOTRON_V_TH);
            params.t_window = p.t_steps;
            train_tempotron(&net, &enc, train, val, &params, epochs, p.seed)
        }
        Rule::Bal => {
            let params = BalParams {
                u_init: 1.0,
                u_decay: p.u_decay,
                bins: 4,
                query_fraction: p.query_fraction,
                lr: p.eta,
                alpha: p.alpha,
                center: p.v_th,
                seed_fraction: 0.1,
            };
            train_bal(&net, &enc, train, val, &params, epochs, p.seed)
        }
    }
}

/// Default assignment used when a run is not driven by a search study.
pub fn default_params(seed: u64) -> TrialParams {
    TrialParams {
        tau_m: 2.0,
        v_th: 0.2,
        bias: 0.03,
        h1: 128,
        h2: 64,
        t_steps: 20,
        gain: 1.0,
        scheme: EncoderScheme::Poisson,
        lambda_lr: 0.005,
        eta: 0.08,
        alpha: 0.002,
        u_decay: 0.999,
        query_fraction: 0.5,
        seed,
    }
}
