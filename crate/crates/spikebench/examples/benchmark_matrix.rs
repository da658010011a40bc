//! The full benchmark loop in library form: per-rule hyperparameter search,
//! retrain of each best configuration, and a Markdown summary table.
//! Equivalent to `spikebench bench` with a shared dataset and seed.

use spikebench::data::{generate_synthetic, stratified_split, SyntheticSpec};
use spikebench::hpo::{run_study, SearchSpace};
use spikebench::runner::{train_rule, Rule};

fn main() {
    let spec = SyntheticSpec::separable(16, 400, 6.0, 9);
    let dataset = generate_synthetic(&spec).unwrap();
    let (train, val) = stratified_split(&dataset, 0.8, 9).unwrap();
    let space = SearchSpace::default();

    println!("| Rule | Accuracy (%) | Training Time (s) |");
    println!("|---|---|---|");
    for rule in Rule::ALL {
        let study = run_study(
            &space,
            |p| train_rule(rule, p, &train, &val, 10).map(|(_, r)| r),
            10,
            4,
            9,
        )
        .unwrap();
        let best = study.best().params.clone();
        let (_, report) = train_rule(rule, &best, &train, &val, 30).unwrap();
        println!(
            "| {rule} | {:.2} | {:.3} |",
            report.final_val_accuracy * 100.0,
            report.wall_time_seconds
        );
    }
}
