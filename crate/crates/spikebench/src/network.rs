//! Three-layer feedforward spiking network: input -> h1 -> h2 -> 2 logits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lif::{decay_factor, lif_step, LayerState, LifParams};
use crate::spike::SpikeTrain;

/// Dense synaptic weights between adjacent layers, row = input channel,
/// column = output neuron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
    pub fn init_uniform<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let bound = 1.0 / (rows as f64).sqrt();
        let data = (0..rows * cols)
            .map(|_| rng.gen_range(-bound..=bound))
            .collect();
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Current into each output neuron given a binary input spike vector.
    pub fn project_spikes(&self, spikes: &[u8]) -> Vec<f64> {
        debug_assert_eq!(spikes.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (r, &s) in spikes.iter().enumerate() {
            if s == 1 {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                for (o, w) in out.iter_mut().zip(row) {
                    *o += w;
                }
            }
        }
        out
    }

    /// In-place add of `delta`, scaled by `scale`. Panics in debug builds if
    /// the result is non-finite; weights must stay finite after every update.
    pub fn add_scaled(&mut self, delta: &WeightMatrix, scale: f64) {
        debug_assert_eq!(self.rows, delta.rows);
        debug_assert_eq!(self.cols, delta.cols);
        for (w, d) in self.data.iter_mut().zip(&delta.data) {
            *w += scale * d;
            debug_assert!(w.is_finite());
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|w| w.is_finite())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// How the output layer turns activity into logits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutMode {
    /// Output neurons are LIF; logits are total spike counts over T steps.
    SpikeCount,
    /// Output neurons integrate without spiking; logits are the final
    /// membrane potentials.
    MembraneLogit,
}

pub const N_OUT: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub d_in: usize,
    pub h1: usize,
    pub h2: usize,
    pub lif_h1: LifParams,
    pub lif_h2: LifParams,
    pub t_steps: usize,
    pub readout: ReadoutMode,
    /// Time constant of the output layer. Defaults to `lif_h2.tau_m`; the
    /// membrane-logit readout typically wants a much slower leak so the
    /// logits reflect the whole window.
    #[serde(default)]
    pub readout_tau: Option<f64>,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d_in == 0 || self.h1 == 0 || self.h2 == 0 {
            return Err(Error::InvalidParam("layer sizes must be positive".into()));
        }
        if self.t_steps == 0 {
            return Err(Error::InvalidParam("t_steps must be positive".into()));
        }
        self.lif_h1.validate()?;
        self.lif_h2.validate()
    }
}

/// The three weight matrices of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkWeights {
    pub w_in_h1: WeightMatrix,
    pub w_h1_h2: WeightMatrix,
    pub w_h2_out: WeightMatrix,
}

impl NetworkWeights {
    pub fn init<R: Rng>(config: &NetworkConfig, rng: &mut R) -> Self {
        Self {
            w_in_h1: WeightMatrix::init_uniform(config.d_in, config.h1, rng),
            w_h1_h2: WeightMatrix::init_uniform(config.h1, config.h2, rng),
            w_h2_out: WeightMatrix::init_uniform(config.h2, N_OUT, rng),
        }
    }

    fn check_shapes(&self, config: &NetworkConfig) -> Result<()> {
        let chain = [
            (self.w_in_h1.rows(), config.d_in, "w_in_h1 rows vs d_in"),
            (self.w_in_h1.cols(), config.h1, "w_in_h1 cols vs h1"),
            (self.w_h1_h2.rows(), config.h1, "w_h1_h2 rows vs h1"),
            (self.w_h1_h2.cols(), config.h2, "w_h1_h2 cols vs h2"),
            (self.w_h2_out.rows(), config.h2, "w_h2_out rows vs h2"),
            (self.w_h2_out.cols(), N_OUT, "w_h2_out cols vs n_out"),
        ];
        for (got, want, what) in chain {
            if got != want {
                return Err(Error::ShapeMismatch(format!("{what}: {got} != {want}")));
            }
        }
        Ok(())
    }
}

/// Everything recorded during one forward pass: spikes and membrane traces
/// for each layer, plus the output logits.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardRecord {
    pub spikes_h1: SpikeTrain,
    pub spikes_h2: SpikeTrain,
    pub spikes_out: SpikeTrain,
    /// Pre-reset membrane potentials, T x N each.
    pub trace_h1: Vec<Vec<f64>>,
    pub trace_h2: Vec<Vec<f64>>,
    pub trace_out: Vec<Vec<f64>>,
    pub logits: [f64; 2],
}

/// Run the full forward pass, recording all spikes and membrane traces.
///
/// The output layer reuses the second hidden layer's LIF parameters.
pub fn forward(
    config: &NetworkConfig,
    weights: &NetworkWeights,
    input: &SpikeTrain,
) -> Result<ForwardRecord> {
    config.validate()?;
    weights.check_shapes(config)?;
    if input.channels() != config.d_in {
        return Err(Error::ShapeMismatch(format!(
            "input channels {} != d_in {}",
            input.channels(),
            config.d_in
        )));
    }
    if input.t_steps() != config.t_steps {
        return Err(Error::ShapeMismatch(format!(
            "input t_steps {} != config t_steps {}",
            input.t_steps(),
            config.t_steps
        )));
    }

    let t_steps = config.t_steps;
    let mut state_h1 = LayerState::zeros(config.h1);
    let mut state_h2 = LayerState::zeros(config.h2);
    let mut state_out = LayerState::zeros(N_OUT);

    let mut spikes_h1 = SpikeTrain::zeros(t_steps, config.h1)?;
    let mut spikes_h2 = SpikeTrain::zeros(t_steps, config.h2)?;
    let mut spikes_out = SpikeTrain::zeros(t_steps, N_OUT)?;
    let mut trace_h1 = Vec::with_capacity(t_steps);
    let mut trace_h2 = Vec::with_capacity(t_steps);
    let mut trace_out = Vec::with_capacity(t_steps);

    let mut out_params = config.lif_h2;
    if let Some(tau) = config.readout_tau {
        out_params.tau_m = tau;
    }
    let mut out_spike_counts = [0.0f64; 2];

    for t in 0..t_steps {
        let i_h1 = weights.w_in_h1.project_spikes(input.step(t));
        let s1 = step_with_trace(&mut state_h1, &i_h1, &config.lif_h1, &mut trace_h1);
        spikes_h1.set_step(t, &s1);

        let i_h2 = weights.w_h1_h2.project_spikes(&s1);
        let s2 = step_with_trace(&mut state_h2, &i_h2, &config.lif_h2, &mut trace_h2);
        spikes_h2.set_step(t, &s2);

        let i_out = weights.w_h2_out.project_spikes(&s2);
        match config.readout {
            ReadoutMode::SpikeCount => {
                let so = step_with_trace(&mut state_out, &i_out, &out_params, &mut trace_out);
                out_spike_counts[0] += so[0] as f64;
                out_spike_counts[1] += so[1] as f64;
                spikes_out.set_step(t, &so);
            }
            ReadoutMode::MembraneLogit => {
                crate::lif::integrate_step(&mut state_out, &i_out, &out_params);
                trace_out.push(state_out.v.clone());
            }
        }
    }

    let logits = match config.readout {
        ReadoutMode::SpikeCount => out_spike_counts,
        ReadoutMode::MembraneLogit => [state_out.v[0], state_out.v[1]],
    };

    Ok(ForwardRecord {
        spikes_h1,
        spikes_h2,
        spikes_out,
        trace_h1,
        trace_h2,
        trace_out,
        logits,
    })
}

/// Run only the two hidden layers, returning their spike rasters. Used by
/// the tempotron trainer, which replaces the output layer with its own
/// readout units.
pub fn forward_hidden(
    config: &NetworkConfig,
    w_in_h1: &WeightMatrix,
    w_h1_h2: &WeightMatrix,
    input: &SpikeTrain,
) -> Result<(SpikeTrain, SpikeTrain)> {
    config.validate()?;
    if input.channels() != config.d_in || input.t_steps() != config.t_steps {
        return Err(Error::ShapeMismatch(format!(
            "input {}x{} does not match config t_steps {} d_in {}",
            input.t_steps(),
            input.channels(),
            config.t_steps,
            config.d_in
        )));
    }
    if w_in_h1.rows() != config.d_in
        || w_in_h1.cols() != config.h1
        || w_h1_h2.rows() != config.h1
        || w_h1_h2.cols() != config.h2
    {
        return Err(Error::ShapeMismatch("hidden weight shapes do not chain".into()));
    }
    let mut state_h1 = LayerState::zeros(config.h1);
    let mut state_h2 = LayerState::zeros(config.h2);
    let mut spikes_h1 = SpikeTrain::zeros(config.t_steps, config.h1)?;
    let mut spikes_h2 = SpikeTrain::zeros(config.t_steps, config.h2)?;
    for t in 0..config.t_steps {
        let i_h1 = w_in_h1.project_spikes(input.step(t));
        let s1 = lif_step(&mut state_h1, &i_h1, &config.lif_h1);
        spikes_h1.set_step(t, &s1);
        let i_h2 = w_h1_h2.project_spikes(&s1);
        let s2 = lif_step(&mut state_h2, &i_h2, &config.lif_h2);
        spikes_h2.set_step(t, &s2);
    }
    Ok((spikes_h1, spikes_h2))
}

fn step_with_trace(
    state: &mut LayerState,
    input: &[f64],
    params: &LifParams,
    trace: &mut Vec<Vec<f64>>,
) -> Vec<u8> {
    // record the pre-reset potential
    let decay = decay_factor(params.tau_m).expect("validated params");
    let pre: Vec<f64> = state
        .v
        .iter()
        .zip(input)
        .map(|(&v, &i)| decay * v + params.r_m * i + params.bias)
        .collect();
    trace.push(pre);
    lif_step(state, input, params)
}

/// Argmax over the two logits; ties break toward class 0.
pub fn predict(record: &ForwardRecord) -> usize {
    if record.logits[1] > record.logits[0] {
        1
    } else {
        0
    }
}
