//! Flag groups shared by several subcommands.

use clap::{Args, ValueEnum};
use serde::Serialize;

use botnet_gnn::detector::{GnnConfig, TrainConfig};
use botnet_gnn::topo::{DatasetConfig, SplitSizes, Topology};
use botnet_gnn::NormMode;

use crate::config::{display, CsvList};
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// 10k-node backgrounds, 500 bots, 8/1/1 graphs.
    Desk,
    /// ~144k-node backgrounds, 10k bots, 768/96/96 graphs.
    Paper,
}

/// Dataset generation settings; unset values come from the preset.
#[derive(Args, Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct DataOpts {
    #[arg(long, value_enum, default_value = "desk")]
    pub preset: Preset,
    /// Background graph size.
    #[arg(long)]
    pub n_background: Option<usize>,
    /// Background average degree.
    #[arg(long)]
    pub avg_degree: Option<f64>,
    /// Botnet size(s); several sizes are cycled over the graphs.
    #[arg(long, value_name = "N[,N..]")]
    pub bots: Option<CsvList<usize>>,
    /// Graph counts as TRAIN,VAL,TEST, or a total split 8:1:1.
    #[arg(long, value_name = "T,V,T")]
    pub graphs: Option<CsvList<usize>>,
    /// Kademlia bucket size.
    #[arg(long)]
    pub kademlia_bucket: Option<usize>,
    /// Plain `u v` edge list used as the background of every graph.
    #[arg(long, value_name = "FILE")]
    pub background_edges: Option<std::path::PathBuf>,
}

impl DataOpts {
    pub fn dataset_config(&self, topology: Topology, seed: u64) -> CliResult<DatasetConfig> {
        let mut c = match self.preset {
            Preset::Desk => DatasetConfig::desk(topology, seed),
            Preset::Paper => DatasetConfig::large_scale(topology, seed),
        };
        if let Some(n) = self.n_background {
            c.n_background = n;
        }
        if let Some(d) = self.avg_degree {
            c.avg_degree = d;
        }
        if let Some(b) = &self.bots {
            c.bot_sizes = b.0.clone();
        }
        if let Some(g) = &self.graphs {
            c.graphs = match g.0[..] {
                [total] => SplitSizes::from_total(total),
                [train, val, test] => SplitSizes { train, val, test },
                _ => {
                    return Err(CliError::config(format!(
                        "--graphs takes TRAIN,VAL,TEST or a total, got '{g}'"
                    )))
                }
            };
        }
        if let Some(k) = self.kademlia_bucket {
            c.kademlia_bucket = k;
        }
        c.background_edges = self.background_edges.clone();
        Ok(c)
    }
}

/// Architecture and optimizer settings.
#[derive(Args, Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TrainOpts {
    /// Hidden width of every layer.
    #[arg(long, default_value_t = 32)]
    pub hidden: usize,
    /// Adjacency normalization.
    #[arg(long, default_value = "source-degree")]
    #[serde(serialize_with = "display")]
    pub norm: NormMode,
    #[arg(long, default_value_t = 0.005)]
    pub lr: f64,
    #[arg(long, default_value_t = 5e-4)]
    pub weight_decay: f64,
    /// Factor applied to the learning rate on a validation plateau.
    #[arg(long, default_value_t = 0.25)]
    pub lr_decay: f64,
    #[arg(long, default_value_t = 1)]
    pub plateau_patience: usize,
    #[arg(long, default_value_t = 5)]
    pub early_stop_patience: usize,
    #[arg(long, default_value_t = 50)]
    pub max_epochs: usize,
    /// Loss weights for the benign and bot classes.
    #[arg(long, default_value = "1,1", value_name = "W0,W1")]
    pub class_weights: CsvList<f64>,
    /// Decision threshold on the bot probability.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

impl TrainOpts {
    pub fn gnn_config(&self, layers: usize) -> GnnConfig {
        GnnConfig {
            num_layers: layers,
            hidden: self.hidden,
            norm: self.norm,
            ..GnnConfig::default()
        }
    }

    pub fn train_config(&self, seed: u64) -> CliResult<TrainConfig> {
        let [w0, w1] = self.class_weights.0[..] else {
            return Err(CliError::config("--class-weights takes exactly two values"));
        };
        Ok(TrainConfig {
            lr: self.lr,
            weight_decay: self.weight_decay,
            lr_decay_factor: self.lr_decay,
            plateau_patience: self.plateau_patience,
            early_stop_patience: self.early_stop_patience,
            max_epochs: self.max_epochs,
            seed,
            class_weights: [w0, w1],
            threshold: self.threshold,
        })
    }
}

/// Logistic-regression baseline settings.
#[derive(Args, Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct LrOpts {
    /// Full-batch gradient steps.
    #[arg(long, default_value_t = 500)]
    pub lr_epochs: usize,
    /// Gradient step size.
    #[arg(long, default_value_t = 0.5)]
    pub lr_step: f64,
}
