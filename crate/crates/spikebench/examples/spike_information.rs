//! Entropy and mutual information of spike trains, the quantities behind
//! the active-learning sample scores.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spikebench::learning::{mutual_information, spike_entropy};
use spikebench::spike::SpikeTrain;

fn main() {
    let bins = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    // a noisy source and a degraded copy of it
    let t_steps = 2000;
    let mut source = SpikeTrain::zeros(t_steps, 8).unwrap();
    let mut copy = SpikeTrain::zeros(t_steps, 8).unwrap();
    let mut noise = SpikeTrain::zeros(t_steps, 8).unwrap();
    for t in 0..t_steps {
        for c in 0..8 {
            let s = rng.gen_range(0..=1u8);
            source.set(t, c, s);
            // copy follows the source except for 10% bit flips
            let flipped = if rng.gen_bool(0.1) { 1 - s } else { s };
            copy.set(t, c, flipped);
            noise.set(t, c, rng.gen_range(0..=1));
        }
    }

    let h = spike_entropy(&source, bins).unwrap();
    println!("H(source)            = {h:.3} bits");
    println!(
        "I(source; source)    = {:.3} bits",
        mutual_information(&source, &source, bins).unwrap()
    );
    println!(
        "I(source; 10% flips) = {:.3} bits",
        mutual_information(&source, &copy, bins).unwrap()
    );
    println!(
        "I(source; noise)     = {:.3} bits",
        mutual_information(&source, &noise, bins).unwrap()
    );
}
