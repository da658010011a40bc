//! Bio-inspired active learning: train while querying labels for only half
//! of the unlabeled pool, selected by uncertainty-weighted mutual
//! information, and compare against plain surrogate-gradient training on
//! the full labeled set.

use spikebench::data::{generate_synthetic, stratified_split, SyntheticSpec};
use spikebench::runner::{default_params, train_rule, Rule};

fn main() {
    let spec = SyntheticSpec::separable(16, 800, 6.0, 42);
    let dataset = generate_synthetic(&spec).unwrap();
    let (train, val) = stratified_split(&dataset, 0.8, 42).unwrap();

    let params = default_params(42);

    let (_, full) = train_rule(Rule::Sgl, &params, &train, &val, 50).unwrap();
    let (_, active) = train_rule(Rule::Bal, &params, &train, &val, 50).unwrap();

    let queried = active.labels_queried.unwrap();
    let seed = (0.1 * train.len() as f64).round() as usize;
    let pool = train.len() - seed;
    println!("labeled: {seed} seed + {queried} queried of a {pool}-sample pool");
    println!("full supervision:  val {:.3}", full.final_val_accuracy);
    println!("active ({}% pool): val {:.3}", 100 * queried / pool, active.final_val_accuracy);
}
