//! Random hyperparameter search over the full space, run on four worker
//! threads. Results are keyed by trial id, so the outcome is identical for
//! any parallelism level.

use spikebench::data::{generate_synthetic, stratified_split, SyntheticSpec};
use spikebench::hpo::{run_study, SearchSpace, TrialStatus};
use spikebench::runner::{train_rule, Rule};

fn main() {
    let spec = SyntheticSpec::separable(16, 400, 6.0, 1);
    let dataset = generate_synthetic(&spec).unwrap();
    let (train, val) = stratified_split(&dataset, 0.8, 1).unwrap();

    let space = SearchSpace::default();
    let study = run_study(
        &space,
        |p| train_rule(Rule::Sgl, p, &train, &val, 15).map(|(_, r)| r),
        12,
        4,
        1,
    )
    .unwrap();

    println!("trial  status    val acc  tau_m  v_th   h1   h2   T");
    for t in &study.trials {
        let acc = t
            .val_accuracy()
            .map_or("  -  ".into(), |a| format!("{a:.3}"));
        println!(
            "{:5}  {:8}  {acc}    {:.2}   {:.2}  {:3}  {:3}  {:2}",
            t.trial_id,
            if t.status == TrialStatus::Complete { "complete" } else { "failed" },
            t.params.tau_m,
            t.params.v_th,
            t.params.h1,
            t.params.h2,
            t.params.t_steps,
        );
    }
    let best = study.best();
    println!(
        "\nbest: trial {} at {:.3} ({:.1}s total)",
        best.trial_id,
        best.val_accuracy().unwrap(),
        study.total_wall_time_seconds
    );
}
