//! Seeded uniform random hyperparameter search over the documented ranges,
//! with deterministic per-trial parameter streams and parallelism-invariant
//! study results.

use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{derive_seed, EncoderScheme};
use crate::error::{Error, Result};
use crate::learning::TrainReport;

/// Inclusive sampling ranges for every tunable dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub tau_m: (f64, f64),
    pub v_th: (f64, f64),
    pub bias: (f64, f64),
    pub h1: (usize, usize),
    pub h2: (usize, usize),
    pub t_steps: (usize, usize),
    pub gain: (f64, f64),
    pub schemes: Vec<EncoderScheme>,
    /// Tempotron learning rate magnitude.
    pub lambda_lr: (f64, f64),
    /// Surrogate-gradient learning rate.
    pub eta: (f64, f64),
    /// Surrogate smoothness.
    pub alpha: (f64, f64),
    /// Active-learning uncertainty decay.
    pub u_decay: (f64, f64),
    /// Active-learning query fraction.
    pub query_fraction: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            tau_m: (1.1, 3.0),
            v_th: (0.2, 0.8),
            bias: (0.0, 0.05),
            h1: (64, 128),
            h2: (32, 64),
            t_steps: (5, 20),
            gain: (0.3, 1.0),
            schemes: vec![EncoderScheme::Poisson, EncoderScheme::Rate],
            lambda_lr: (0.005, 0.1),
            eta: (0.04, 0.15),
            // The surrogate gates on raw membrane logits, which integrate
            // over the whole window; only a wide Gaussian keeps them in range.
            alpha: (0.001, 0.004),
            u_decay: (0.99, 1.0),
            query_fraction: (0.3, 1.0),
        }
    }
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        fn check(name: &str, lo: f64, hi: f64) -> Result<()> {
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::InvalidParam(format!(
                    "bad range for {name}: [{lo}, {hi}]"
                )));
            }
            Ok(())
        }
        check("tau_m", self.tau_m.0, self.tau_m.1)?;
        check("v_th", self.v_th.0, self.v_th.1)?;
        check("bias", self.bias.0, self.bias.1)?;
        check("gain", self.gain.0, self.gain.1)?;
        check("lambda_lr", self.lambda_lr.0, self.lambda_lr.1)?;
        check("eta", self.eta.0, self.eta.1)?;
        check("alpha", self.alpha.0, self.alpha.1)?;
        check("u_decay", self.u_decay.0, self.u_decay.1)?;
        check("query_fraction", self.query_fraction.0, self.query_fraction.1)?;
        for (name, (lo, hi)) in [
            ("h1", self.h1),
            ("h2", self.h2),
            ("t_steps", self.t_steps),
        ] {
            if lo > hi || lo == 0 {
                return Err(Error::InvalidParam(format!(
                    "bad range for {name}: [{lo}, {hi}]"
                )));
            }
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidParam("schemes must not be empty".into()));
        }
        Ok(())
    }
}

/// One sampled hyperparameter assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub tau_m: f64,
    pub v_th: f64,
    pub bias: f64,
    pub h1: usize,
    pub h2: usize,
    pub t_steps: usize,
    pub gain: f64,
    pub scheme: EncoderScheme,
    pub lambda_lr: f64,
    pub eta: f64,
    pub alpha: f64,
    pub u_decay: f64,
    pub query_fraction: f64,
    /// Per-trial seed for weight init and encoding.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub trial_id: usize,
    pub params: TrialParams,
    pub status: TrialStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<TrainReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Trial {
    pub fn val_accuracy(&self) -> Option<f64> {
        self.report.as_ref().map(|r| r.final_val_accuracy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub trials: Vec<Trial>,
    pub best_trial_id: usize,
    pub total_wall_time_seconds: f64,
}

impl StudyReport {
    pub fn best(&self) -> &Trial {
        &self.trials[self.best_trial_id]
    }
}

fn uniform_in<R: Rng>(rng: &mut R, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.gen_range(range.0..=range.1)
    }
}

fn uniform_int<R: Rng>(rng: &mut R, range: (usize, usize)) -> usize {
    rng.gen_range(range.0..=range.1)
}

/// Independent uniform draw per dimension from a deterministic stream keyed
/// by `(base_seed, trial_index)`.
pub fn sample_trial(space: &SearchSpace, trial_index: usize, base_seed: u64) -> TrialParams {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(base_seed, trial_index as u64, 0x517));
    TrialParams {
        tau_m: uniform_in(&mut rng, space.tau_m),
        v_th: uniform_in(&mut rng, space.v_th),
        bias: uniform_in(&mut rng, space.bias),
        h1: uniform_int(&mut rng, space.h1),
        h2: uniform_int(&mut rng, space.h2),
        t_steps: uniform_int(&mut rng, space.t_steps),
        gain: uniform_in(&mut rng, space.gain),
        scheme: space.schemes[rng.gen_range(0..space.schemes.len())],
        lambda_lr: uniform_in(&mut rng, space.lambda_lr),
        eta: uniform_in(&mut rng, space.eta),
        alpha: uniform_in(&mut rng, space.alpha),
        u_decay: uniform_in(&mut rng, space.u_decay),
        query_fraction: uniform_in(&mut rng, space.query_fraction),
        seed: derive_seed(base_seed, trial_index as u64, 0x7ea1),
    }
}

/// Run `n_trials` objective evaluations, possibly across threads. Failed
/// trials are recorded and excluded from best-selection; the report is
/// identical for any parallelism level except for wall-time fields.
pub fn run_study<F>(
    space: &SearchSpace,
    objective: F,
    n_trials: usize,
    parallelism: usize,
    base_seed: u64,
) -> Result<StudyReport>
where
    F: Fn(&TrialParams) -> Result<TrainReport> + Send + Sync,
{
    if n_trials == 0 {
        return Err(Error::InvalidParam("n_trials must be >= 1".into()));
    }
    space.validate()?;
    let start = Instant::now();

    let params: Vec<TrialParams> = (0..n_trials)
        .map(|i| sample_trial(space, i, base_seed))
        .collect();

    let parallelism = parallelism.max(1).min(n_trials);
    let mut trials: Vec<Option<Trial>> = (0..n_trials).map(|_| None).collect();

    if parallelism == 1 {
        for (i, p) in params.iter().enumerate() {
            trials[i] = Some(run_one(i, p, &objective));
        }
    } else {
        let next = Arc::new(Mutex::new(0usize));
        let (tx, rx) = mpsc::channel::<Trial>();
        thread::scope(|scope| {
            for _ in 0..parallelism {
                let next = Arc::clone(&next);
                let tx = tx.clone();
                let params = &params;
                let objective = &objective;
                scope.spawn(move || loop {
                    let i = {
                        let mut guard = next.lock().unwrap();
                        let i = *guard;
                        if i >= params.len() {
                            break;
                        }
                        *guard += 1;
                        i
                    };
                    let trial = run_one(i, &params[i], objective);
                    if tx.send(trial).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            for trial in rx {
                let id = trial.trial_id;
                trials[id] = Some(trial);
            }
        });
    }

    let trials: Vec<Trial> = trials.into_iter().map(|t| t.expect("all trials ran")).collect();
    let best = trials
        .iter()
        .filter(|t| t.status == TrialStatus::Complete)
        .max_by(|a, b| {
            // ties go to the lowest trial_id
            match a
                .val_accuracy()
                .partial_cmp(&b.val_accuracy())
                .unwrap_or(std::cmp::Ordering::Equal)
            {
                std::cmp::Ordering::Equal => b.trial_id.cmp(&a.trial_id),
                other => other,
            }
        })
        .ok_or_else(|| Error::Study("all trials failed".into()))?;

    Ok(StudyReport {
        best_trial_id: best.trial_id,
        trials: trials.clone(),
        total_wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

fn run_one<F>(id: usize, params: &TrialParams, objective: &F) -> Trial
where
    F: Fn(&TrialParams) -> Result<TrainReport>,
{
    match objective(params) {
        Ok(report) => Trial {
            trial_id: id,
            params: params.clone(),
            status: TrialStatus::Complete,
            report: Some(report),
            error: None,
        },
        Err(e) => Trial {
            trial_id: id,
            params: params.clone(),
            status: TrialStatus::Failed,
            report: None,
            error: Some(e.to_string()),
        },
    }
}
