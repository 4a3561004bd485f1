use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use botnet_gnn::analysis::MetricsReport;
use botnet_gnn::detector::{evaluate, train_lr, Detector, EvalReport};
use botnet_gnn::io_util::write_atomic;
use botnet_gnn::topo::{read_graph, Split};

use crate::config::{display, write_run_config};
use crate::data::{ensure_dir, Dataset};
use crate::opts::LrOpts;
use crate::table::{f, Table};
use crate::{CliError, CliResult};

pub const METRICS_TSV: &str = "metrics.tsv";
pub const METRICS_JSON: &str = "metrics.json";

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
#[serde(rename_all = "kebab-case")]
pub struct EvalArgs {
    /// Dataset directory (or its manifest file).
    #[arg(long)]
    pub data: PathBuf,
    /// Split to evaluate: train, val or test.
    #[arg(long, default_value = "test")]
    #[serde(serialize_with = "display")]
    pub split: Split,
    /// Trained model file (GNN or LR).
    #[arg(long, required_unless_present = "baseline")]
    pub model: Option<PathBuf>,
    /// Fit the LR baseline on the train split and evaluate it instead.
    #[arg(long, value_parser = ["lr"], conflicts_with = "model")]
    pub baseline: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub lr_opts: LrOpts,
    /// Expected layer count; a model with another depth is rejected.
    #[arg(long)]
    pub layers: Option<usize>,
    /// Expected hidden width; a model with another width is rejected.
    #[arg(long)]
    pub hidden: Option<usize>,
    /// Decision threshold on the bot probability.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Directory for metrics.tsv, metrics.json and the run config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn metrics_table(names: &[String], report: &EvalReport) -> Table {
    let mut t = Table::new(&["graph", "tp", "fp", "tn", "fn", "FP%", "FN%", "DET%", "F1"]);
    let row = |name: &str, m: &MetricsReport| {
        vec![
            name.to_string(),
            m.tp.to_string(),
            m.fp.to_string(),
            m.tn.to_string(),
            m.fn_.to_string(),
            f(m.fp_rate, 3),
            f(m.fn_rate, 3),
            f(m.det_rate, 3),
            f(m.f1, 4),
        ]
    };
    for (name, m) in names.iter().zip(&report.per_graph) {
        t.push(row(name, m));
    }
    t.push(row("mean", &report.aggregate));
    t
}

fn check_expected(det: &Detector, layers: Option<usize>, hidden: Option<usize>) -> CliResult {
    let Detector::Gnn(p) = det else {
        if layers.is_some() || hidden.is_some() {
            return Err(CliError::config(
                "--layers/--hidden given but the model is LR",
            ));
        }
        return Ok(());
    };
    let c = p.config();
    if let Some(h) = hidden.filter(|&h| h != c.hidden) {
        return Err(CliError::config(format!(
            "model has hidden width {}, expected {h}",
            c.hidden
        )));
    }
    if let Some(l) = layers.filter(|&l| l != c.num_layers) {
        return Err(CliError::config(format!(
            "model has {} layers, expected {l}",
            c.num_layers
        )));
    }
    Ok(())
}

pub fn run(args: EvalArgs) -> CliResult {
    let data = Dataset::open(&args.data)?;
    let detector = match &args.model {
        Some(path) => Detector::load(path)?,
        None => {
            let train = data.split(Split::Train)?;
            Detector::Lr(train_lr(
                &train,
                args.lr_opts.lr_epochs,
                args.lr_opts.lr_step,
            )?)
        }
    };
    check_expected(&detector, args.layers, args.hidden)?;
    let graphs = data.split(args.split)?;
    let report = evaluate(&detector, &graphs, args.threshold)?;
    let table = metrics_table(data.names(args.split), &report);
    print!("{}", table.render());
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_atomic(&out.join(METRICS_TSV), table.tsv().as_bytes())?;
        let json =
            serde_json::to_string_pretty(&report).map_err(|e| CliError::config(e.to_string()))?;
        write_atomic(&out.join(METRICS_JSON), (json + "\n").as_bytes())?;
        write_run_config(out, "eval", &args)?;
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
#[serde(rename_all = "kebab-case")]
pub struct PredictArgs {
    /// Trained model file (GNN or LR).
    #[arg(long)]
    pub model: PathBuf,
    /// Graph file to label.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Output file (tab-separated node, probability, label); stdout if unset.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_predict(args: PredictArgs) -> CliResult {
    let detector = Detector::load(&args.model)?;
    let lg = read_graph(&args.graph)?;
    let pred = detector.predict(&lg, args.threshold)?;
    let mut text = String::from("node\tprob\tlabel\n");
    for (i, (p, l)) in pred.probs.iter().zip(&pred.labels).enumerate() {
        text += &format!("{i}\t{p:.6}\t{}\n", u8::from(*l));
    }
    match &args.out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(())
}
