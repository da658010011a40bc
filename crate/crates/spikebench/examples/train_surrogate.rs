//! Train the three-layer network with surrogate gradient learning on a
//! synthetic separable problem and print the learning curve.

use spikebench::data::{generate_synthetic, stratified_split, SyntheticSpec};
use spikebench::runner::{default_params, train_rule, Rule};

fn main() {
    let spec = SyntheticSpec::separable(16, 800, 6.0, 42);
    let dataset = generate_synthetic(&spec).unwrap();
    let (train, val) = stratified_split(&dataset, 0.8, 42).unwrap();

    let params = default_params(42);
    let (model, report) = train_rule(Rule::Sgl, &params, &train, &val, 50).unwrap();

    println!("epoch  train accuracy");
    for (epoch, acc) in report.accuracy_curve.iter().enumerate().step_by(5) {
        println!("{epoch:5}  {acc:.3}");
    }
    println!(
        "\nfinal: train {:.3}, val {:.3} in {:.1}s",
        report.final_train_accuracy, report.final_val_accuracy, report.wall_time_seconds
    );

    // the trained model classifies raw (unnormalized) feature rows
    let sample = &val.features[0];
    println!(
        "first val sample -> class {} (label {})",
        model.predict_raw(sample, 0).unwrap(),
        val.labels[0]
    );
}
