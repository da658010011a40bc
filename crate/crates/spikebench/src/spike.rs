//! Binary spike rasters over discrete timesteps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sanity bound; long statistical tests use rasters of 10^4+ steps.
pub const MAX_T_STEPS: usize = 1 << 20;

/// A T x N binary raster, timestep-major. The common currency between the
/// encoders, the network forward pass, and the learning rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeTrain {
    data: Vec<u8>,
    t_steps: usize,
    channels: usize,
}

impl SpikeTrain {
    pub fn zeros(t_steps: usize, channels: usize) -> Result<Self> {
        if t_steps == 0 || t_steps > MAX_T_STEPS {
            return Err(Error::InvalidParam(format!(
                "t_steps must be in [1, {MAX_T_STEPS}], got {t_steps}"
            )));
        }
        Ok(Self {
            data: vec![0; t_steps * channels],
            t_steps,
            channels,
        })
    }

    pub fn t_steps(&self) -> usize {
        self.t_steps
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn get(&self, t: usize, c: usize) -> u8 {
        self.data[t * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, t: usize, c: usize, v: u8) {
        debug_assert!(v <= 1);
        self.data[t * self.channels + c] = v;
    }

    /// The spike vector at timestep `t`.
    #[inline]
    pub fn step(&self, t: usize) -> &[u8] {
        &self.data[t * self.channels..(t + 1) * self.channels]
    }

    pub fn set_step(&mut self, t: usize, spikes: &[u8]) {
        debug_assert_eq!(spikes.len(), self.channels);
        debug_assert!(spikes.iter().all(|&s| s <= 1));
        self.data[t * self.channels..(t + 1) * self.channels].copy_from_slice(spikes);
    }

    /// Total spikes per channel.
    pub fn counts_per_channel(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.channels];
        for t in 0..self.t_steps {
            for (c, &s) in self.step(t).iter().enumerate() {
                counts[c] += s as usize;
            }
        }
        counts
    }

    /// Population spike count at each timestep.
    pub fn population_counts(&self) -> Vec<usize> {
        (0..self.t_steps)
            .map(|t| self.step(t).iter().map(|&s| s as usize).sum())
            .collect()
    }

    /// Spike times per channel, ascending.
    pub fn spike_times(&self) -> Vec<Vec<usize>> {
        let mut times = vec![Vec::new(); self.channels];
        for t in 0..self.t_steps {
            for (c, &s) in self.step(t).iter().enumerate() {
                if s == 1 {
                    times[c].push(t);
                }
            }
        }
        times
    }

    pub fn total_spikes(&self) -> usize {
        self.data.iter().map(|&s| s as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_rejects_bad_lengths() {
        assert!(SpikeTrain::zeros(0, 4).is_err());
        assert!(SpikeTrain::zeros(MAX_T_STEPS + 1, 4).is_err());
        assert!(SpikeTrain::zeros(1, 4).is_ok());
        assert!(SpikeTrain::zeros(MAX_T_STEPS, 4).is_ok());
    }

    #[test]
    fn counts_and_times_agree() {
        let mut train = SpikeTrain::zeros(5, 3).unwrap();
        train.set(0, 1, 1);
        train.set(2, 1, 1);
        train.set(4, 2, 1);
        assert_eq!(train.counts_per_channel(), vec![0, 2, 1]);
        assert_eq!(train.spike_times(), vec![vec![], vec![0, 2], vec![4]]);
        assert_eq!(train.population_counts(), vec![1, 0, 1, 0, 1]);
        assert_eq!(train.total_spikes(), 3);
    }
}
