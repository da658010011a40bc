//! Plug-in Shannon entropy and mutual information between spike trains.
//!
//! Symbols are per-step population spike counts bucketed into `bins`
//! equal-width buckets over [0, channels]; each timestep contributes one
//! symbol.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::spike::SpikeTrain;

fn symbol(count: usize, channels: usize, bins: usize) -> usize {
    if channels == 0 {
        return 0;
    }
    // equal-width buckets over the inclusive range [0, channels]
    (count * bins / (channels + 1)).min(bins - 1)
}

fn symbols(train: &SpikeTrain, bins: usize) -> Vec<usize> {
    let channels = train.channels();
    train
        .population_counts()
        .into_iter()
        .map(|c| symbol(c, channels, bins))
        .collect()
}

fn entropy_of_counts<I: IntoIterator<Item = usize>>(counts: I, total: usize) -> f64 {
    let total = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Plug-in Shannon entropy (bits) of the bucketed per-step population
/// spike-count distribution.
pub fn spike_entropy(train: &SpikeTrain, bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(Error::InvalidParam(format!("bins must be >= 2, got {bins}")));
    }
    let syms = symbols(train, bins);
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for s in syms {
        *counts.entry(s).or_insert(0) += 1;
    }
    Ok(entropy_of_counts(counts.into_values(), train.t_steps()))
}

/// Plug-in mutual information (bits) between paired per-step symbols:
/// `I = sum p(x,y) log2(p(x,y) / (p(x) p(y)))`, which is nonnegative by
/// construction (clamped at 0 against float rounding).
pub fn mutual_information(pre: &SpikeTrain, post: &SpikeTrain, bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(Error::InvalidParam(format!("bins must be >= 2, got {bins}")));
    }
    if pre.t_steps() != post.t_steps() {
        return Err(Error::InvalidInput(format!(
            "t_steps mismatch: pre {} vs post {}",
            pre.t_steps(),
            post.t_steps()
        )));
    }
    let xs = symbols(pre, bins);
    let ys = symbols(post, bins);
    let n = xs.len() as f64;

    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut px: HashMap<usize, usize> = HashMap::new();
    let mut py: HashMap<usize, usize> = HashMap::new();
    for (&x, &y) in xs.iter().zip(&ys) {
        *joint.entry((x, y)).or_insert(0) += 1;
        *px.entry(x).or_insert(0) += 1;
        *py.entry(y).or_insert(0) += 1;
    }

    let mut mi = 0.0;
    for (&(x, y), &c) in &joint {
        let p_xy = c as f64 / n;
        let p_x = px[&x] as f64 / n;
        let p_y = py[&y] as f64 / n;
        mi += p_xy * (p_xy / (p_x * p_y)).log2();
    }
    Ok(mi.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn train_from_counts(counts: &[usize], channels: usize) -> SpikeTrain {
        let mut train = SpikeTrain::zeros(counts.len(), channels).unwrap();
        for (t, &k) in counts.iter().enumerate() {
            for c in 0..k {
                train.set(t, c, 1);
            }
        }
        train
    }

    #[test]
    fn all_zero_train_has_zero_entropy() {
        let train = SpikeTrain::zeros(32, 5).unwrap();
        assert_eq!(spike_entropy(&train, 4).unwrap(), 0.0);
    }

    #[test]
    fn two_equiprobable_symbols_one_bit() {
        // alternate silence and full population
        let counts: Vec<usize> = (0..20).map(|t| if t % 2 == 0 { 0 } else { 4 }).collect();
        let train = train_from_counts(&counts, 4);
        assert!((spike_entropy(&train, 4).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_four_symbols_two_bits() {
        // channels = 3, bins = 4: counts 0..=3 land in distinct buckets
        let counts: Vec<usize> = (0..40).map(|t| t % 4).collect();
        let train = train_from_counts(&counts, 3);
        assert!((spike_entropy(&train, 4).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bins_below_two_rejected() {
        let train = SpikeTrain::zeros(4, 2).unwrap();
        assert!(spike_entropy(&train, 1).is_err());
        assert!(mutual_information(&train, &train, 0).is_err());
    }

    #[test]
    fn identical_trains_mi_equals_entropy() {
        let counts: Vec<usize> = (0..50).map(|t| (t * 7) % 5).collect();
        let train = train_from_counts(&counts, 4);
        let h = spike_entropy(&train, 5).unwrap();
        let i = mutual_information(&train, &train, 5).unwrap();
        assert!((i - h).abs() < 1e-9);
    }

    #[test]
    fn constant_post_train_zero_mi() {
        let counts: Vec<usize> = (0..30).map(|t| t % 3).collect();
        let pre = train_from_counts(&counts, 3);
        let post = SpikeTrain::zeros(30, 3).unwrap();
        assert_eq!(mutual_information(&pre, &post, 4).unwrap(), 0.0);
    }

    #[test]
    fn independent_trains_small_mi() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = 1024;
        let mut make = |p: f64| {
            let mut train = SpikeTrain::zeros(t, 4).unwrap();
            for step in 0..t {
                for c in 0..4 {
                    if rng.gen_bool(p) {
                        train.set(step, c, 1);
                    }
                }
            }
            train
        };
        let pre = make(0.4);
        let post = make(0.4);
        let i = mutual_information(&pre, &post, 4).unwrap();
        assert!(i <= 0.05, "independent MI = {i}");
    }

    #[test]
    fn mi_bounded_by_marginal_entropies() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let t = rng.gen_range(8..64);
            let channels = rng.gen_range(1..6);
            let mut pre = SpikeTrain::zeros(t, channels).unwrap();
            let mut post = SpikeTrain::zeros(t, channels).unwrap();
            for step in 0..t {
                for c in 0..channels {
                    pre.set(step, c, rng.gen_bool(0.5) as u8);
                    post.set(step, c, rng.gen_bool(0.5) as u8);
                }
            }
            let bins = rng.gen_range(2..6);
            let i = mutual_information(&pre, &post, bins).unwrap();
            let h_pre = spike_entropy(&pre, bins).unwrap();
            let h_post = spike_entropy(&post, bins).unwrap();
            assert!(i >= 0.0);
            assert!(i <= h_pre.min(h_post) + 1e-9);
        }
    }

    #[test]
    fn mi_rejects_length_mismatch() {
        let a = SpikeTrain::zeros(4, 2).unwrap();
        let b = SpikeTrain::zeros(5, 2).unwrap();
        assert!(mutual_information(&a, &b, 2).is_err());
    }
}
