//! Feature-to-spike-train encoders: stochastic Poisson (Bernoulli per step)
//! and deterministic evenly-spaced rate coding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spike::SpikeTrain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderScheme {
    Poisson,
    Rate,
}

impl std::str::FromStr for EncoderScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poisson" => Ok(Self::Poisson),
            "rate" => Ok(Self::Rate),
            other => Err(Error::InvalidParam(format!(
                "unknown encoder scheme '{other}' (expected poisson or rate)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub scheme: EncoderScheme,
    pub t_steps: usize,
    /// Scales a feature value in [0,1] to a per-step firing probability/rate.
    pub gain: f64,
    pub seed: u64,
    /// When true, the per-sample encoding seed is additionally mixed with the
    /// epoch index so every epoch sees fresh Poisson draws. When false, each
    /// sample's train is identical across epochs.
    pub reseed_per_epoch: bool,
}

impl EncoderConfig {
    pub fn new(scheme: EncoderScheme, t_steps: usize, gain: f64, seed: u64) -> Self {
        Self {
            scheme,
            t_steps,
            gain,
            seed,
            reseed_per_epoch: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_steps == 0 {
            return Err(Error::InvalidParam("t_steps must be >= 1".into()));
        }
        if !(self.gain >= 0.0 && self.gain.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "gain must be finite and >= 0, got {}",
                self.gain
            )));
        }
        Ok(())
    }
}

/// Normalized feature vector, every value in [0,1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

/// Per-dimension min/max used for normalization, fitted on training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormStats {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows
            .first()
            .ok_or_else(|| Error::InvalidInput("cannot fit stats on empty data".into()))?
            .len();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for row in rows {
            for (j, &v) in row.iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { min, max })
    }
}

/// Min-max normalization, clamped to [0,1]. Dimensions with max == min map
/// to 0.
pub fn normalize_features(raw: &[f64], stats: &NormStats) -> Result<FeatureVector> {
    if raw.len() != stats.min.len() {
        return Err(Error::ShapeMismatch(format!(
            "feature length {} != stats length {}",
            raw.len(),
            stats.min.len()
        )));
    }
    let values = raw
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let (lo, hi) = (stats.min[j], stats.max[j]);
            if hi <= lo {
                0.0
            } else {
                ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
            }
        })
        .collect();
    Ok(FeatureVector { values })
}

/// Mix a base seed with a sample index (and optionally an epoch) into an
/// independent per-sample stream seed. SplitMix64 finalizer.
pub fn derive_seed(base: u64, sample_index: u64, epoch: u64) -> u64 {
    let mut z = base
        .wrapping_add(sample_index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(epoch.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Bernoulli-per-step discretization of a homogeneous Poisson process:
/// spike ~ Bernoulli(gain * f_j) independently per step and channel.
pub fn poisson_encode(f: &FeatureVector, cfg: &EncoderConfig, seed: u64) -> Result<SpikeTrain> {
    cfg.validate()?;
    for (j, &v) in f.values.iter().enumerate() {
        let p = cfg.gain * v;
        if p > 1.0 {
            return Err(Error::InvalidParam(format!(
                "gain * feature = {p} > 1 at dimension {j}; not a valid probability"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = SpikeTrain::zeros(cfg.t_steps, f.values.len())?;
    for t in 0..cfg.t_steps {
        for (c, &v) in f.values.iter().enumerate() {
            let p = cfg.gain * v;
            // sample every cell so the raster is a pure function of the seed
            let u: f64 = rng.gen();
            if u < p {
                train.set(t, c, 1);
            }
        }
    }
    Ok(train)
}

/// Deterministic rate coding: channel j emits round(gain * f_j * T) spikes,
/// evenly spaced by the floor rule
/// `spike at t iff floor((t+1)k/T) > floor(tk/T)`.
pub fn rate_encode(f: &FeatureVector, cfg: &EncoderConfig) -> Result<SpikeTrain> {
    cfg.validate()?;
    let t_steps = cfg.t_steps;
    let mut train = SpikeTrain::zeros(t_steps, f.values.len())?;
    for (c, &v) in f.values.iter().enumerate() {
        let k = (cfg.gain * v * t_steps as f64).round() as usize;
        let k = k.min(t_steps);
        for t in 0..t_steps {
            if (t + 1) * k / t_steps > t * k / t_steps {
                train.set(t, c, 1);
            }
        }
    }
    Ok(train)
}

/// Encode with the scheme selected in the config, deriving the per-sample
/// seed from (base seed, sample index, epoch).
pub fn encode_sample(
    f: &FeatureVector,
    cfg: &EncoderConfig,
    sample_index: usize,
    epoch: usize,
) -> Result<SpikeTrain> {
    match cfg.scheme {
        EncoderScheme::Poisson => {
            let epoch_key = if cfg.reseed_per_epoch { epoch as u64 } else { 0 };
            let seed = derive_seed(cfg.seed, sample_index as u64, epoch_key);
            poisson_encode(f, cfg, seed)
        }
        EncoderScheme::Rate => rate_encode(f, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(scheme: EncoderScheme, t: usize, gain: f64) -> EncoderConfig {
        EncoderConfig::new(scheme, t, gain, 42)
    }

    #[test]
    fn normalize_bounds_and_degenerate_dim() {
        let stats = NormStats {
            min: vec![0.0, -1.0, 5.0],
            max: vec![2.0, 1.0, 5.0],
        };
        let lo = normalize_features(&[0.0, -1.0, 5.0], &stats).unwrap();
        assert_eq!(lo.values, vec![0.0, 0.0, 0.0]);
        let hi = normalize_features(&[2.0, 1.0, 5.0], &stats).unwrap();
        assert_eq!(hi.values, vec![1.0, 1.0, 0.0]);
        // out-of-range values clamp
        let clamped = normalize_features(&[4.0, -3.0, 5.0], &stats).unwrap();
        assert_eq!(clamped.values, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn poisson_zero_rate_is_silent() {
        let f = FeatureVector {
            values: vec![0.0, 0.5],
        };
        let c = cfg(EncoderScheme::Poisson, 50, 1.0);
        for seed in 0..20 {
            let train = poisson_encode(&f, &c, seed).unwrap();
            assert_eq!(train.counts_per_channel()[0], 0);
        }
    }

    #[test]
    fn poisson_certain_firing() {
        let f = FeatureVector { values: vec![1.0] };
        let c = cfg(EncoderScheme::Poisson, 30, 1.0);
        let train = poisson_encode(&f, &c, 7).unwrap();
        assert_eq!(train.counts_per_channel()[0], 30);
    }

    #[test]
    fn poisson_rejects_probability_above_one() {
        let f = FeatureVector { values: vec![0.8] };
        let c = cfg(EncoderScheme::Poisson, 10, 2.0);
        assert!(poisson_encode(&f, &c, 0).is_err());
    }

    #[test]
    fn poisson_half_rate_binomial_interval() {
        // p = 0.5, T = 10_000: 99.99% binomial interval ~ [4850, 5150]
        let f = FeatureVector { values: vec![0.5] };
        let c = EncoderConfig::new(EncoderScheme::Poisson, 1024, 1.0, 3);
        // assemble 10_000 steps out of repeated max-length encodings
        let mut count = 0usize;
        let mut steps = 0usize;
        let mut seed = 100;
        while steps < 10_000 {
            let take = (10_000 - steps).min(1024);
            let mut c2 = c;
            c2.t_steps = take;
            let train = poisson_encode(&f, &c2, seed).unwrap();
            count += train.counts_per_channel()[0];
            steps += take;
            seed += 1;
        }
        assert!((4850..=5150).contains(&count), "count = {count}");
    }

    #[test]
    fn poisson_reproducible() {
        let f = FeatureVector {
            values: vec![0.3, 0.7, 0.1],
        };
        let c = cfg(EncoderScheme::Poisson, 20, 1.0);
        let a = poisson_encode(&f, &c, 123).unwrap();
        let b = poisson_encode(&f, &c, 123).unwrap();
        assert_eq!(a, b);
        let d = poisson_encode(&f, &c, 124).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn rate_zero_and_full() {
        let f = FeatureVector {
            values: vec![0.0, 1.0],
        };
        let c = cfg(EncoderScheme::Rate, 10, 1.0);
        let train = rate_encode(&f, &c).unwrap();
        assert_eq!(train.counts_per_channel(), vec![0, 10]);
    }

    #[test]
    fn rate_half_is_five_spaced_spikes() {
        let f = FeatureVector { values: vec![0.5] };
        let c = cfg(EncoderScheme::Rate, 10, 1.0);
        let train = rate_encode(&f, &c).unwrap();
        assert_eq!(train.counts_per_channel(), vec![5]);
        // floor rule for T=10, k=5: spikes at odd steps
        assert_eq!(train.spike_times()[0], vec![1, 3, 5, 7, 9]);
    }

    #[test]
    fn rate_exact_count_always() {
        let c = cfg(EncoderScheme::Rate, 13, 0.9);
        for i in 0..=20 {
            let v = i as f64 / 20.0;
            let f = FeatureVector { values: vec![v] };
            let train = rate_encode(&f, &c).unwrap();
            let expected = (0.9 * v * 13.0).round() as usize;
            assert_eq!(train.counts_per_channel()[0], expected);
        }
    }

    #[test]
    fn rate_monotone_in_feature() {
        let c = cfg(EncoderScheme::Rate, 17, 1.0);
        let mut prev = 0usize;
        for i in 0..=50 {
            let f = FeatureVector {
                values: vec![i as f64 / 50.0],
            };
            let n = rate_encode(&f, &c).unwrap().counts_per_channel()[0];
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn derive_seed_mixes_epoch_only_when_asked() {
        let f = FeatureVector { values: vec![0.5] };
        let mut c = cfg(EncoderScheme::Poisson, 16, 1.0);
        c.reseed_per_epoch = false;
        let a = encode_sample(&f, &c, 3, 0).unwrap();
        let b = encode_sample(&f, &c, 3, 9).unwrap();
        assert_eq!(a, b);
        c.reseed_per_epoch = true;
        let d = encode_sample(&f, &c, 3, 9).unwrap();
        assert_ne!(a, d);
    }
}
