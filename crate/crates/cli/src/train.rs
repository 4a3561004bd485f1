use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;

use botnet_gnn::detector::{train_lr, train_with_progress, EpochRecord};
use botnet_gnn::io_util::write_atomic;
use botnet_gnn::topo::Split;

use crate::config::write_run_config;
use crate::data::{ensure_dir, Dataset};
use crate::opts::{LrOpts, TrainOpts};
use crate::table::{f, Table};
use crate::CliResult;

pub const GNN_MODEL_FILE: &str = "model.json";
pub const LR_MODEL_FILE: &str = "lr_model.json";
pub const HISTORY_FILE: &str = "history.tsv";

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
#[serde(rename_all = "kebab-case")]
pub struct TrainArgs {
    /// Dataset directory (or its manifest file).
    #[arg(long)]
    pub data: PathBuf,
    /// Fit the LR baseline instead of the GNN.
    #[arg(long, value_parser = ["lr"])]
    pub baseline: Option<String>,
    /// Number of message-passing layers.
    #[arg(long, default_value_t = 12)]
    pub layers: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub train: TrainOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub lr_opts: LrOpts,
    /// Seed for initialization and graph order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for the model, history and run config.
    #[arg(long)]
    pub out: PathBuf,
    /// No per-epoch progress lines.
    #[arg(long)]
    pub quiet: bool,
}

pub fn history_table(history: &[EpochRecord]) -> Table {
    let mut t = Table::new(&[
        "epoch",
        "lr",
        "train_loss",
        "val_loss",
        "val_fp",
        "val_fn",
        "val_det",
        "val_f1",
        "best",
    ]);
    for e in history {
        t.push(vec![
            e.epoch.to_string(),
            format!("{:.6e}", e.lr),
            f(e.train_loss, 6),
            f(e.val_loss, 6),
            f(e.val.fp_rate, 3),
            f(e.val.fn_rate, 3),
            f(e.val.det_rate, 3),
            f(e.val.f1, 4),
            if e.improved {
                "*".into()
            } else {
                String::new()
            },
        ]);
    }
    t
}

pub fn run(args: TrainArgs) -> CliResult {
    let gnn = args.train.gnn_config(args.layers);
    let cfg = args.train.train_config(args.seed)?;
    if args.baseline.is_none() {
        gnn.validate()?;
    }
    let data = Dataset::open(&args.data)?;
    let train = data.split(Split::Train)?;
    ensure_dir(&args.out)?;
    if args.baseline.is_some() {
        let model = train_lr(&train, args.lr_opts.lr_epochs, args.lr_opts.lr_step)?;
        let path = args.out.join(LR_MODEL_FILE);
        model.save(&path)?;
        write_run_config(&args.out, "train", &args)?;
        println!("wrote {}", path.display());
        return Ok(());
    }

    let val = data.split(Split::Val)?;
    let quiet = args.quiet;
    let outcome = train_with_progress(&train, &val, &gnn, &cfg, |e| {
        if !quiet {
            eprintln!(
                "epoch {:>3}  lr {:.2e}  train {:.5}  val {:.5}  val_f1 {:.4}{}",
                e.epoch,
                e.lr,
                e.train_loss,
                e.val_loss,
                e.val.f1,
                if e.improved { "  *" } else { "" }
            );
        }
    })?;
    let path = args.out.join(GNN_MODEL_FILE);
    outcome.params.save(&path)?;
    write_history(&args.out, &outcome.history)?;
    write_run_config(&args.out, "train", &args)?;
    println!(
        "best epoch {} of {}; wrote {}",
        outcome.best_epoch,
        outcome.history.len(),
        path.display()
    );
    Ok(())
}

fn write_history(dir: &Path, history: &[EpochRecord]) -> CliResult {
    write_atomic(
        &dir.join(HISTORY_FILE),
        history_table(history).tsv().as_bytes(),
    )?;
    Ok(())
}
