use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Serialize;

use botnet_gnn::analysis::{
    mixing_summary, topology_report, Lambda2Mode, PathLengthOptions, SpectralOptions,
    TopologyReport,
};
use botnet_gnn::io_util::write_atomic;
use botnet_gnn::topo::{gen_topology, read_graph, Topology, DEFAULT_KADEMLIA_BUCKET};
use botnet_gnn::Graph;

use crate::config::{display, write_run_config};
use crate::data::ensure_dir;
use crate::table::{opt, Table};
use crate::{CliError, CliResult};

pub const ANALYSIS_TSV: &str = "analysis.tsv";
pub const ANALYSIS_TXT: &str = "analysis.txt";

/// `all` or a comma-separated list of topology names.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologySet(pub Vec<Topology>);

impl FromStr for TopologySet {
    type Err = botnet_gnn::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(TopologySet(Topology::SYNTHETIC.to_vec()));
        }
        s.split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<Vec<_>, _>>()
            .map(TopologySet)
    }
}

impl fmt::Display for TopologySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|t| t.as_str()).collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Signed,
    Absolute,
}

#[derive(Args, Debug, Serialize)]
#[command(args_override_self = true)]
#[serde(rename_all = "kebab-case")]
pub struct AnalyzeArgs {
    /// Topologies to generate and analyze: `all` or a comma list.
    #[arg(long, required_unless_present = "graph", conflicts_with = "graph")]
    #[serde(serialize_with = "display_opt")]
    pub topology: Option<TopologySet>,
    /// Node count of generated topologies.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Seed for randomized topologies.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_KADEMLIA_BUCKET)]
    pub kademlia_bucket: usize,
    /// Labeled graph file: compare the botnet subgraph with the whole graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Second eigenvalue with sign, or largest non-trivial magnitude.
    #[arg(long, value_enum, default_value = "signed")]
    pub lambda2_mode: ModeArg,
    /// Power-iteration tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 500_000)]
    pub max_iters: usize,
    /// BFS sources when a component exceeds the exact-size threshold.
    #[arg(long, default_value_t = 1000)]
    pub sample_size: usize,
    /// Directory for analysis.tsv, analysis.txt and the run config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn display_opt<T: fmt::Display, S: serde::Serializer>(
    v: &Option<T>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => display(v, s),
        None => s.serialize_none(),
    }
}

fn row(name: &str, r: &TopologyReport) -> Vec<String> {
    let mut flags = Vec::new();
    if r.largest_component_only {
        flags.push("largest-component");
    }
    if r.bipartite {
        flags.push("bipartite");
    }
    if r.degenerate {
        flags.push("degenerate");
    }
    if !r.path_length_exact && r.avg_path_length.is_some() {
        flags.push("sampled");
    }
    vec![
        name.to_string(),
        r.n.to_string(),
        r.m.to_string(),
        r.components.to_string(),
        opt(r.lambda2, 4),
        opt(r.avg_path_length, 2),
        if flags.is_empty() {
            "-".into()
        } else {
            flags.join(",")
        },
    ]
}

pub fn run(args: AnalyzeArgs) -> CliResult {
    let spectral = SpectralOptions {
        tol: args.tol,
        max_iters: args.max_iters,
        seed: args.seed,
        mode: match args.lambda2_mode {
            ModeArg::Signed => Lambda2Mode::Signed,
            ModeArg::Absolute => Lambda2Mode::Absolute,
        },
    };
    let paths = PathLengthOptions {
        sample_size: args.sample_size,
        seed: args.seed,
        ..PathLengthOptions::default()
    };
    let mut table = Table::new(&[
        "topology",
        "n",
        "m",
        "components",
        "lambda2",
        "l_G",
        "flags",
    ]);
    let mut kv = String::new();

    if let Some(path) = &args.graph {
        let lg = read_graph(path)?;
        let s = mixing_summary(&lg, &spectral, &paths)?;
        table.push(row("botnet", &s.botnet));
        table.push(row("full", &s.full));
        kv = s.to_key_values();
    } else {
        let set = args.topology.as_ref().expect("required by clap");
        for &t in &set.0 {
            if t == Topology::None {
                return Err(CliError::config("topology 'none' has no edges to analyze"));
            }
            let edges = gen_topology(t, args.n, args.kademlia_bucket, args.seed)?;
            let g = Graph::from_edges(args.n, edges)?;
            let r = topology_report(&g, &spectral, &paths)?;
            eprintln!("analyzed {t}");
            table.push(row(t.as_str(), &r));
            kv += &r.to_key_values(&format!("{t}."));
        }
    }
    print!("{}", table.render());
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_atomic(&out.join(ANALYSIS_TSV), table.tsv().as_bytes())?;
        write_atomic(&out.join(ANALYSIS_TXT), kv.as_bytes())?;
        write_run_config(out, "analyze", &args)?;
    }
    Ok(())
}
