//! Round-trip a dataset through CSV: generate, save, reload, split, train.

use spikebench::data::{
    generate_synthetic, load_csv, save_csv, stratified_split, SyntheticSpec,
};
use spikebench::runner::{default_params, train_rule, Rule};

fn main() {
    let dir = std::env::temp_dir().join("spikebench_csv_example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dataset.csv");

    let spec = SyntheticSpec::separable(8, 200, 6.0, 3);
    let dataset = generate_synthetic(&spec).unwrap();
    save_csv(&dataset, &path).unwrap();
    println!("wrote {}", path.display());

    let reloaded = load_csv(&path).unwrap();
    assert_eq!(reloaded.features, dataset.features);
    let counts = reloaded.class_counts();
    println!(
        "reloaded: n={} d={} class0={} class1={}",
        reloaded.len(),
        reloaded.dim(),
        counts[0],
        counts[1]
    );

    let (train, val) = stratified_split(&reloaded, 0.8, 3).unwrap();
    let mut params = default_params(3);
    params.t_steps = 10;
    let (_, report) = train_rule(Rule::Sgl, &params, &train, &val, 20).unwrap();
    println!("val accuracy {:.3}", report.final_val_accuracy);
}
