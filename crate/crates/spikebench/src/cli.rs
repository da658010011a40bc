//! Command-line entry point: dataset generation, single-rule training,
//! evaluation, hyperparameter studies, and the full benchmark matrix.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 data error, 3 runtime
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::data::{generate_synthetic, load_csv, save_csv, stratified_split, Dataset, SyntheticSpec};
use crate::encoding::EncoderScheme;
use crate::error::{Error, Result};
use crate::hpo::{run_study, SearchSpace, StudyReport, TrialParams};
use crate::learning::TrainedModel;
use crate::runner::{default_params, train_rule, Rule};

#[derive(Parser, Debug)]
#[command(
    name = "spikebench",
    version,
    about = "Spiking neural network training and benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic binary-classification dataset CSV.
    GenData(GenDataArgs),
    /// Train one learning rule end-to-end and emit a report.
    Train(TrainArgs),
    /// Evaluate a saved model on a dataset.
    Eval(EvalArgs),
    /// Run a hyperparameter study for one rule.
    Hpo(HpoArgs),
    /// Run the full benchmark matrix over the selected rules.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Base random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Dataset CSV path; omit to use a synthetic dataset.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output path for the JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file; CLI flags take precedence over its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print parameter resolution (flag vs config vs default).
    #[arg(long)]
    verbose: bool,
}

#[derive(Args, Debug)]
struct GenDataArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of samples.
    #[arg(long)]
    n: Option<usize>,
    /// Feature dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Class mean separation in units of the class standard deviation.
    #[arg(long)]
    sep: Option<f64>,
    /// Fraction of class-1 samples.
    #[arg(long)]
    balance: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct ParamOverrides {
    #[arg(long)]
    tau_m: Option<f64>,
    #[arg(long)]
    v_th: Option<f64>,
    #[arg(long)]
    bias: Option<f64>,
    #[arg(long)]
    h1: Option<usize>,
    #[arg(long)]
    h2: Option<usize>,
    #[arg(long)]
    t_steps: Option<usize>,
    /// Encoder scheme: poisson or rate.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    gain: Option<f64>,
    /// Surrogate-gradient / BAL learning rate.
    #[arg(long)]
    eta: Option<f64>,
    /// Surrogate smoothness.
    #[arg(long)]
    alpha: Option<f64>,
    /// Tempotron learning rate.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    u_decay: Option<f64>,
    #[arg(long)]
    query_fraction: Option<f64>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Learning rule: sgl, tempotron, or bal.
    #[arg(long)]
    rule: Option<String>,
    /// Training epochs (rounds for bal).
    #[arg(long)]
    epochs: Option<usize>,
    /// Train split fraction.
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Save the trained model as JSON.
    #[arg(long)]
    save_model: Option<PathBuf>,
    #[command(flatten)]
    params: ParamOverrides,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Saved model JSON from `train --save-model`.
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args, Debug)]
struct HpoArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Learning rule: sgl, tempotron, or bal.
    #[arg(long)]
    rule: Option<String>,
    /// Number of trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Epochs per trial.
    #[arg(long)]
    epochs: Option<usize>,
    /// Concurrent trial evaluations.
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Also write the study as CSV.
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated rules to benchmark.
    #[arg(long, default_value = "sgl,tempotron,bal")]
    rules: String,
    /// HPO trials per rule.
    #[arg(long)]
    trials: Option<usize>,
    /// Epochs for the final retrain of each rule's best configuration.
    #[arg(long)]
    epochs: Option<usize>,
    /// Epochs per HPO trial.
    #[arg(long)]
    hpo_epochs: Option<usize>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Write the Markdown table here in addition to stdout.
    #[arg(long)]
    markdown_out: Option<PathBuf>,
}

/// Flag > config file > default, with optional resolution logging.
struct Resolver {
    table: toml::Table,
    verbose: bool,
}

impl Resolver {
    fn load(path: Option<&Path>, verbose: bool) -> Result<Self> {
        let table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::InvalidParam(format!("cannot read config {}: {e}", p.display()))
                })?;
                text.parse::<toml::Table>()
                    .map_err(|e| Error::InvalidParam(format!("bad config file: {e}")))?
            }
            None => toml::Table::new(),
        };
        Ok(Self { table, verbose })
    }

    fn get<T: FromToml + std::str::FromStr + std::fmt::Display + Clone>(
        &self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> T {
        let (value, source) = if let Some(v) = flag {
            (v, "flag")
        } else if let Some(v) = self.table.get(key).and_then(FromToml::from_toml) {
            (v, "config")
        } else {
            (default, "default")
        };
        if self.verbose {
            eprintln!("  {key} = {value} ({source})");
        }
        value
    }
}

trait FromToml: Sized {
    fn from_toml(v: &toml::Value) -> Option<Self>;
}

impl FromToml for f64 {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
    }
}

impl FromToml for u64 {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_integer().and_then(|i| u64::try_from(i).ok())
    }
}

impl FromToml for usize {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_integer().and_then(|i| usize::try_from(i).ok())
    }
}

impl FromToml for String {
    fn from_toml(v: &toml::Value) -> Option<Self> {
        v.as_str().map(str::to_owned)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub rule: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_params: Option<TrialParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub val_accuracy_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_time_seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvMeta {
    pub seed: u64,
    pub machine: String,
    pub timestamp_unix: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchRow>,
    pub environment: EnvMeta,
}

impl BenchmarkReport {
    /// Markdown table mirroring the report's numbers exactly.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Rule | Accuracy (%) | Training Time (s) |\n|---|---|---|\n");
        for row in &self.rows {
            let acc = row
                .val_accuracy_pct
                .map_or_else(|| "failed".to_string(), |a| format!("{a}"));
            let time = row
                .train_time_seconds
                .map_or_else(|| "-".to_string(), |t| format!("{t}"));
            out.push_str(&format!("| {} | {} | {} |\n", row.rule, acc, time));
        }
        out
    }
}

pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful exits
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidParam(_) | Error::ShapeMismatch(_) => 1,
        Error::InvalidInput(_) | Error::CsvParse { .. } | Error::Io(_) => 2,
        Error::Json(_) | Error::Study(_) => 3,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenData(args) => cmd_gen_data(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Hpo(args) => cmd_hpo(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn resolver(common: &CommonArgs) -> Result<Resolver> {
    if common.verbose {
        eprintln!("parameter resolution (flag > config > default):");
    }
    Resolver::load(common.config.as_deref(), common.verbose)
}

fn load_or_generate(
    common: &CommonArgs,
    r: &Resolver,
    seed: u64,
) -> Result<Dataset> {
    match &common.data {
        Some(path) => load_csv(path),
        None => {
            let n = r.get("n", None, 800usize);
            let d = r.get("d", None, 16usize);
            let spec = SyntheticSpec::separable(d, n, 6.0, seed);
            generate_synthetic(&spec)
        }
    }
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, json)?,
        None => println!("{json}"),
    }
    Ok(())
}

fn resolve_params(r: &Resolver, o: &ParamOverrides, seed: u64) -> Result<TrialParams> {
    let defaults = default_params(seed);
    let scheme_str = r.get(
        "scheme",
        o.scheme.clone(),
        match defaults.scheme {
            EncoderScheme::Poisson => "poisson".to_string(),
            EncoderScheme::Rate => "rate".to_string(),
        },
    );
    Ok(TrialParams {
        tau_m: r.get("tau_m", o.tau_m, defaults.tau_m),
        v_th: r.get("v_th", o.v_th, defaults.v_th),
        bias: r.get("bias", o.bias, defaults.bias),
        h1: r.get("h1", o.h1, defaults.h1),
        h2: r.get("h2", o.h2, defaults.h2),
        t_steps: r.get("t_steps", o.t_steps, defaults.t_steps),
        gain: r.get("gain", o.gain, defaults.gain),
        scheme: scheme_str.parse()?,
        lambda_lr: r.get("lambda", o.lambda, defaults.lambda_lr),
        eta: r.get("eta", o.eta, defaults.eta),
        alpha: r.get("alpha", o.alpha, defaults.alpha),
        u_decay: r.get("u_decay", o.u_decay, defaults.u_decay),
        query_fraction: r.get("query_fraction", o.query_fraction, defaults.query_fraction),
        seed,
    })
}

fn cmd_gen_data(args: GenDataArgs) -> Result<()> {
    let r = resolver(&args.common)?;
    let seed = r.get("seed", args.common.seed, 42u64);
    let n = r.get("n", args.n, 800usize);
    let d = r.get("d", args.d, 16usize);
    let sep = r.get("sep", args.sep, 6.0f64);
    let balance = r.get("balance", args.balance, 0.5f64);

    let mut spec = SyntheticSpec::separable(d, n, sep, seed);
    spec.class_balance = balance;
    let dataset = generate_synthetic(&spec)?;
    let out = args
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("dataset.csv"));
    save_csv(&dataset, &out)?;
    let counts = dataset.class_counts();
    println!(
        "wrote {}: n={} d={} class0={} class1={}",
        out.display(),
        dataset.len(),
        dataset.dim(),
        counts[0],
        counts[1]
    );
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let r = resolver(&args.common)?;
    let seed = r.get("seed", args.common.seed, 42u64);
    let rule: Rule = r.get("rule", args.rule.clone(), "sgl".to_string()).parse()?;
    let epochs = r.get("epochs", args.epochs, 30usize);
    let train_fraction = r.get("train_fraction", args.train_fraction, 0.8f64);
    let params = resolve_params(&r, &args.params, seed)?;

    let dataset = load_or_generate(&args.common, &r, seed)?;
    let (train, val) = stratified_split(&dataset, train_fraction, seed)?;
    let (model, report) = train_rule(rule, &params, &train, &val, epochs)?;

    if let Some(path) = &args.save_model {
        std::fs::write(path, serde_json::to_string(&model)?)?;
    }
    write_json(&report, args.common.out.as_deref())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let _r = resolver(&args.common)?;
    let data = args
        .common
        .data
        .as_ref()
        .ok_or_else(|| Error::InvalidParam("eval requires --data".into()))?;
    let dataset = load_csv(data)?;
    let text = std::fs::read_to_string(&args.model).map_err(|e| {
        Error::InvalidInput(format!("cannot read model {}: {e}", args.model.display()))
    })?;
    let model: TrainedModel = serde_json::from_str(&text)?;
    let accuracy = model.evaluate(&dataset)?;
    #[derive(Serialize)]
    struct EvalReport {
        n: usize,
        accuracy: f64,
    }
    write_json(
        &EvalReport {
            n: dataset.len(),
            accuracy,
        },
        args.common.out.as_deref(),
    )
}

fn study_for_rule(
    rule: Rule,
    train: &Dataset,
    val: &Dataset,
    trials: usize,
    epochs: usize,
    parallelism: usize,
    seed: u64,
) -> Result<StudyReport> {
    let space = SearchSpace::default();
    run_study(
        &space,
        |p| train_rule(rule, p, train, val, epochs).map(|(_, report)| report),
        trials,
        parallelism,
        seed,
    )
}

fn study_to_csv(study: &StudyReport) -> String {
    let mut out = String::from(
        "trial_id,status,val_accuracy,wall_time_seconds,tau_m,v_th,bias,h1,h2,t_steps,scheme,gain,lambda_lr,eta,alpha,u_decay,query_fraction,seed\n",
    );
    for t in &study.trials {
        let (acc, time) = t
            .report
            .as_ref()
            .map(|r| (r.final_val_accuracy.to_string(), r.wall_time_seconds.to_string()))
            .unwrap_or_else(|| ("".into(), "".into()));
        let p = &t.params;
        let scheme = match p.scheme {
            EncoderScheme::Poisson => "poisson",
            EncoderScheme::Rate => "rate",
        };
        out.push_str(&format!(
            "{},{:?},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            t.trial_id,
            t.status,
            acc,
            time,
            p.tau_m,
            p.v_th,
            p.bias,
            p.h1,
            p.h2,
            p.t_steps,
            scheme,
            p.gain,
            p.lambda_lr,
            p.eta,
            p.alpha,
            p.u_decay,
            p.query_fraction,
            p.seed
        ));
    }
    out
}

fn cmd_hpo(args: HpoArgs) -> Result<()> {
    let r = resolver(&args.common)?;
    let seed = r.get("seed", args.common.seed, 42u64);
    let rule: Rule = r.get("rule", args.rule.clone(), "sgl".to_string()).parse()?;
    let trials = r.get("trials", args.trials, 30usize);
    let epochs = r.get("epochs", args.epochs, 10usize);
    let parallelism = r.get("parallelism", args.parallelism, 1usize);
    let train_fraction = r.get("train_fraction", args.train_fraction, 0.8f64);

    let dataset = load_or_generate(&args.common, &r, seed)?;
    let (train, val) = stratified_split(&dataset, train_fraction, seed)?;
    let study = study_for_rule(rule, &train, &val, trials, epochs, parallelism, seed)?;

    let best = study.best();
    eprintln!(
        "best trial {} val_accuracy {:.4}",
        best.trial_id,
        best.val_accuracy().unwrap_or(f64::NAN)
    );
    if let Some(path) = &args.csv_out {
        std::fs::write(path, study_to_csv(&study))?;
    }
    write_json(&study, args.common.out.as_deref())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let r = resolver(&args.common)?;
    let seed = r.get("seed", args.common.seed, 42u64);
    let trials = r.get("trials", args.trials, 30usize);
    let epochs = r.get("epochs", args.epochs, 30usize);
    let hpo_epochs = r.get("hpo_epochs", args.hpo_epochs, 10usize);
    let parallelism = r.get("parallelism", args.parallelism, 1usize);
    let train_fraction = r.get("train_fraction", args.train_fraction, 0.8f64);

    let rules: Vec<Rule> = args
        .rules
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_>>()?;
    if rules.is_empty() {
        return Err(Error::InvalidParam("no rules requested".into()));
    }

    // shared dataset, split, and seed across all rules
    let dataset = load_or_generate(&args.common, &r, seed)?;
    let (train, val) = stratified_split(&dataset, train_fraction, seed)?;

    let mut rows = Vec::new();
    let mut any_ok = false;
    for rule in &rules {
        let row = match bench_one(*rule, &train, &val, trials, hpo_epochs, epochs, parallelism, seed)
        {
            Ok(row) => {
                any_ok = true;
                row
            }
            Err(e) => BenchRow {
                rule: rule.to_string(),
                status: "failed".into(),
                best_params: None,
                val_accuracy_pct: None,
                train_time_seconds: None,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }

    let report = BenchmarkReport {
        rows,
        environment: EnvMeta {
            seed,
            machine: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        },
    };

    let markdown = report.to_markdown();
    println!("{markdown}");
    if let Some(path) = &args.markdown_out {
        std::fs::write(path, &markdown)?;
    }
    write_json(&report, args.common.out.as_deref())?;
    if !any_ok {
        return Err(Error::Study("every rule failed".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn bench_one(
    rule: Rule,
    train: &Dataset,
    val: &Dataset,
    trials: usize,
    hpo_epochs: usize,
    final_epochs: usize,
    parallelism: usize,
    seed: u64,
) -> Result<BenchRow> {
    let study = study_for_rule(rule, train, val, trials, hpo_epochs, parallelism, seed)?;
    let best = study.best().params.clone();
    let (_, report) = train_rule(rule, &best, train, val, final_epochs)?;
    Ok(BenchRow {
        rule: rule.to_string(),
        status: "ok".into(),
        best_params: Some(best),
        // round so the markdown table and the JSON carry identical numbers
        val_accuracy_pct: Some((report.final_val_accuracy * 10_000.0).round() / 100.0),
        train_time_seconds: Some((report.wall_time_seconds * 1000.0).round() / 1000.0),
        error: None,
    })
}
