//! Tempotron training: random frozen hidden layers feed two one-vs-rest
//! readout units that learn when to cross their firing threshold.

use spikebench::learning::{psp_kernel, TempotronParams};
use spikebench::data::{generate_synthetic, stratified_split, SyntheticSpec};
use spikebench::runner::{default_params, train_rule, Rule};

fn main() {
    // the PSP kernel the readout units integrate
    let (tau_m, tau_s) = (2.0, 0.5);
    println!("PSP kernel, tau_m={tau_m} tau_s={tau_s}:");
    for dt in 0..8 {
        let k = psp_kernel(dt as f64, tau_m, tau_s).unwrap();
        println!("  K({dt}) = {k:.4}  {}", "-".repeat((k * 30.0) as usize));
    }
    let p = TempotronParams::new(tau_m, 0.005, 20, 1.5);
    println!("(tau_s defaults to tau_m/4 = {})\n", p.tau_s);

    let spec = SyntheticSpec::separable(16, 800, 6.0, 42);
    let dataset = generate_synthetic(&spec).unwrap();
    let (train, val) = stratified_split(&dataset, 0.8, 42).unwrap();

    let (_, report) = train_rule(Rule::Tempotron, &default_params(42), &train, &val, 50).unwrap();
    println!(
        "tempotron: train {:.3}, val {:.3} in {:.1}s",
        report.final_train_accuracy, report.final_val_accuracy, report.wall_time_seconds
    );
}
