//! Step a single LIF neuron through a square current pulse and print the
//! membrane trace as a crude ASCII plot.

use spikebench::lif::{lif_step, LayerState, LifParams};

fn main() {
    let params = LifParams::new(2.0, 0.5, 0.0);
    let mut state = LayerState::zeros(1);

    println!("tau_m=2.0  v_th=0.5  input: 0.18 for t in 10..40\n");
    println!("  t    v       spike");
    for t in 0..60 {
        let i = if (10..40).contains(&t) { 0.18 } else { 0.0 };
        let spikes = lif_step(&mut state, &[i], &params);
        let v = state.v[0];
        let bar = "#".repeat((v * 40.0) as usize);
        println!(
            " {t:3}  {v:.3}  {} {bar}",
            if spikes[0] == 1 { "*" } else { " " }
        );
    }
}
