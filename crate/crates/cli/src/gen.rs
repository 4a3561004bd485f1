use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use botnet_gnn::topo::{gen_dataset_with_progress, Topology};

use crate::config::{display, write_run_config};
use crate::opts::DataOpts;
use crate::CliResult;

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
#[serde(rename_all = "kebab-case")]
pub struct GenArgs {
    /// Botnet topology: debruijn, chord, kademlia, leet-chord or none.
    #[arg(long)]
    #[serde(serialize_with = "display")]
    pub topology: Topology,
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataOpts,
    /// Master seed; every graph derives its own seed from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for graph files and the manifest.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: GenArgs) -> CliResult {
    let config = args.data.dataset_config(args.topology, args.seed)?;
    let total = config.graphs.total();
    let mut done = 0;
    let manifest = gen_dataset_with_progress(&config, &args.out, |name| {
        done += 1;
        eprintln!("[{done}/{total}] {}", args.out.join(name).display());
    })?;
    write_run_config(&args.out, "gen", &args)?;
    println!(
        "wrote {} train, {} val, {} test graphs to {}",
        manifest.splits.train.len(),
        manifest.splits.val.len(),
        manifest.splits.test.len(),
        args.out.display()
    );
    Ok(())
}
