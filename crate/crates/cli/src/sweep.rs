use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use botnet_gnn::detector::{evaluate, train, Detector};
use botnet_gnn::io_util::{read_to_string, write_atomic};
use botnet_gnn::topo::{gen_dataset, Split, Topology, MANIFEST_FILE};

use crate::analyze::TopologySet;
use crate::config::{display, write_run_config, CsvList};
use crate::data::{ensure_dir, Dataset};
use crate::opts::{DataOpts, TrainOpts};
use crate::table::{f, Table};
use crate::{CliError, CliResult};

pub const SWEEP_MANIFEST: &str = "sweep_manifest.json";
pub const SWEEP_CSV: &str = "sweep.csv";
const SWEEP_FORMAT: &str = "botgnn-sweep";

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    /// Topologies: `all` or a comma list.
    #[arg(long, default_value = "all")]
    #[serde(serialize_with = "display")]
    pub topologies: TopologySet,
    /// Depths to train.
    #[arg(long, default_value = "2,4,6,8,10,12")]
    pub layers: CsvList<usize>,
    /// Training seeds per depth (0..seeds).
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// Holds one dataset directory per topology; missing ones are generated.
    #[arg(long)]
    pub data_root: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataOpts,
    /// Master seed for generated datasets.
    #[arg(long, default_value_t = 7)]
    pub data_seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub train: TrainOpts,
    /// Output directory for the sweep manifest and table.
    #[arg(long)]
    pub out: PathBuf,
    /// No per-cell progress lines.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub topology: Topology,
    pub layers: usize,
    pub seed: u64,
    pub best_epoch: usize,
    pub f1: f64,
    pub det_rate: f64,
    pub fp_rate: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SweepManifest {
    format: String,
    version: u32,
    /// Every setting that affects results; a resumed sweep must match it.
    settings: serde_json::Value,
    cells: Vec<Cell>,
}

fn settings_of(args: &SweepArgs) -> CliResult<serde_json::Value> {
    let mut v = serde_json::to_value(args).map_err(|e| CliError::config(e.to_string()))?;
    if let Some(map) = v.as_object_mut() {
        map.remove("quiet");
        map.remove("out");
    }
    Ok(v)
}

fn load_or_create(path: &Path, settings: serde_json::Value) -> CliResult<SweepManifest> {
    if !path.exists() {
        return Ok(SweepManifest {
            format: SWEEP_FORMAT.into(),
            version: 1,
            settings,
            cells: Vec::new(),
        });
    }
    let m: SweepManifest = serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if m.format != SWEEP_FORMAT {
        return Err(CliError::config(format!(
            "{}: not a sweep manifest",
            path.display()
        )));
    }
    if m.settings != settings {
        return Err(CliError::config(format!(
            "{}: existing sweep used different settings; use a new --out",
            path.display()
        )));
    }
    Ok(m)
}

fn save(path: &Path, m: &SweepManifest) -> CliResult {
    let text = serde_json::to_string_pretty(m).map_err(|e| CliError::config(e.to_string()))?;
    write_atomic(path, (text + "\n").as_bytes())?;
    Ok(())
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

pub fn summary_table(cells: &[Cell], topologies: &[Topology], layers: &[usize]) -> Table {
    let mut t = Table::new(&[
        "topology", "layers", "seeds", "mean_f1", "std_f1", "mean_det", "mean_fp",
    ]);
    for &topo in topologies {
        for &l in layers {
            let group: Vec<&Cell> = cells
                .iter()
                .filter(|c| c.topology == topo && c.layers == l)
                .collect();
            if group.is_empty() {
                continue;
            }
            let (mf1, sf1) = mean_std(&group.iter().map(|c| c.f1).collect::<Vec<_>>());
            let (mdet, _) = mean_std(&group.iter().map(|c| c.det_rate).collect::<Vec<_>>());
            let (mfp, _) = mean_std(&group.iter().map(|c| c.fp_rate).collect::<Vec<_>>());
            t.push(vec![
                topo.to_string(),
                l.to_string(),
                group.len().to_string(),
                f(mf1, 4),
                f(sf1, 4),
                f(mdet, 3),
                f(mfp, 3),
            ]);
        }
    }
    t
}

pub fn run(args: SweepArgs) -> CliResult {
    ensure_dir(&args.out)?;
    let manifest_path = args.out.join(SWEEP_MANIFEST);
    let mut manifest = load_or_create(&manifest_path, settings_of(&args)?)?;
    write_run_config(&args.out, "sweep", &args)?;
    let total = args.topologies.0.len() * args.layers.0.len() * args.seeds as usize;

    for &topo in &args.topologies.0 {
        let dir = args.data_root.join(topo.as_str());
        if !dir.join(MANIFEST_FILE).exists() {
            let config = args.data.dataset_config(topo, args.data_seed)?;
            gen_dataset(&config, &dir)?;
            if !args.quiet {
                eprintln!("generated {}", dir.display());
            }
        }
        let data = Dataset::open(&dir)?;
        let (train_set, val, test) = (
            data.split(Split::Train)?,
            data.split(Split::Val)?,
            data.split(Split::Test)?,
        );
        for &layers in &args.layers.0 {
            for seed in 0..args.seeds {
                let done = manifest
                    .cells
                    .iter()
                    .any(|c| c.topology == topo && c.layers == layers && c.seed == seed);
                if done {
                    continue;
                }
                let outcome = train(
                    &train_set,
                    &val,
                    &args.train.gnn_config(layers),
                    &args.train.train_config(seed)?,
                )?;
                let report = evaluate(&Detector::Gnn(outcome.params), &test, args.train.threshold)?;
                manifest.cells.push(Cell {
                    topology: topo,
                    layers,
                    seed,
                    best_epoch: outcome.best_epoch,
                    f1: report.aggregate.f1,
                    det_rate: report.aggregate.det_rate,
                    fp_rate: report.aggregate.fp_rate,
                });
                save(&manifest_path, &manifest)?;
                if !args.quiet {
                    eprintln!(
                        "[{}/{total}] {topo} layers={layers} seed={seed} f1={:.4}",
                        manifest.cells.len(),
                        report.aggregate.f1
                    );
                }
            }
        }
    }

    let table = summary_table(&manifest.cells, &args.topologies.0, &args.layers.0);
    let csv = table.tsv().replace('\t', ",");
    write_atomic(&args.out.join(SWEEP_CSV), csv.as_bytes())?;
    print!("{}", table.render());
    Ok(())
}
