//! Encode the same feature vector with both encoders and print the rasters.
//!
//! Poisson coding draws an independent Bernoulli spike per timestep, so the
//! raster changes with the seed; rate coding spreads a fixed number of
//! spikes evenly and is fully deterministic.

use spikebench::encoding::{encode_sample, EncoderConfig, EncoderScheme, FeatureVector};
use spikebench::spike::SpikeTrain;

fn print_raster(name: &str, train: &SpikeTrain) {
    println!("{name}:");
    for c in 0..train.channels() {
        let row: String = (0..train.t_steps())
            .map(|t| if train.get(t, c) == 1 { '|' } else { '.' })
            .collect();
        println!("  ch{c}  {row}");
    }
}

fn main() {
    let f = FeatureVector {
        values: vec![0.1, 0.4, 0.8, 1.0],
    };

    let poisson = EncoderConfig::new(EncoderScheme::Poisson, 24, 1.0, 7);
    let rate = EncoderConfig::new(EncoderScheme::Rate, 24, 1.0, 7);

    print_raster("poisson, seed 7", &encode_sample(&f, &poisson, 0, 0).unwrap());
    print_raster("rate", &encode_sample(&f, &rate, 0, 0).unwrap());

    // same sample, different sample index -> fresh poisson draws
    print_raster(
        "poisson, next sample index",
        &encode_sample(&f, &poisson, 1, 0).unwrap(),
    );
}
