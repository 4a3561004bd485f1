//! Dataset generation and the JSON manifest that indexes a dataset directory.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{gen_background, gen_topology, overlay, read_edge_list, read_graph, write_graph};
use super::{LabeledGraph, Topology, DEFAULT_KADEMLIA_BUCKET};
use crate::io_util::{read_to_string, write_atomic};
use crate::{derive_seed, Error, Graph, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
const MANIFEST_FORMAT: &str = "botgraph-dataset";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Split::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::input(format!("unknown split '{s}' (train, val or test)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl SplitSizes {
    /// 8:1:1 split of `total` graphs, remainders going to train.
    pub fn from_total(total: usize) -> Self {
        let tenth = total / 10;
        SplitSizes {
            train: total - 2 * tenth,
            val: tenth,
            test: tenth,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.val + self.test
    }

    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub topology: Topology,
    pub n_background: usize,
    pub avg_degree: f64,
    /// Botnet sizes; graph `i` uses `bot_sizes[i % len]`.
    pub bot_sizes: Vec<usize>,
    pub graphs: SplitSizes,
    pub master_seed: u64,
    pub kademlia_bucket: usize,
    /// Optional edge-list file used as the background of every graph
    /// instead of a synthetic one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background_edges: Option<PathBuf>,
}

impl DatasetConfig {
    /// Laptop-sized defaults: 10k-node background, 500 bots, 8/1/1 graphs.
    pub fn desk(topology: Topology, master_seed: u64) -> Self {
        DatasetConfig {
            topology,
            n_background: 10_000,
            avg_degree: 10.0,
            bot_sizes: vec![500],
            graphs: SplitSizes {
                train: 8,
                val: 1,
                test: 1,
            },
            master_seed,
            kademlia_bucket: DEFAULT_KADEMLIA_BUCKET,
            background_edges: None,
        }
    }

    /// Large-scale sizes: ~144k-node backgrounds with
    /// 10k bots, 960 graphs split 768/96/96.
    pub fn large_scale(topology: Topology, master_seed: u64) -> Self {
        DatasetConfig {
            n_background: 143_895,
            avg_degree: 11.5,
            bot_sizes: vec![10_000],
            graphs: SplitSizes::from_total(960),
            ..Self::desk(topology, master_seed)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.bot_sizes.is_empty() {
            return Err(Error::Config("at least one botnet size is required".into()));
        }
        if self.graphs.total() == 0 {
            return Err(Error::Config(
                "dataset must contain at least one graph".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

/// Index of a dataset directory. Graph paths are relative to the directory
/// holding the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format: String,
    pub version: u32,
    pub config: DatasetConfig,
    pub splits: Splits,
    /// Free-form run configuration and results attached by tools.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

impl DatasetManifest {
    pub fn files(&self, split: Split) -> &[String] {
        match split {
            Split::Train => &self.splits.train,
            Split::Val => &self.splits.val,
            Split::Test => &self.splits.test,
        }
    }

    /// Loads `dir/manifest.json` (or `dir` itself when it names a file).
    pub fn load(dir: &Path) -> Result<(Self, PathBuf)> {
        let (path, base) = if dir.is_file() {
            (
                dir.to_path_buf(),
                dir.parent().unwrap_or(Path::new(".")).to_path_buf(),
            )
        } else {
            (dir.join(MANIFEST_FILE), dir.to_path_buf())
        };
        let text = read_to_string(&path)?;
        let manifest: DatasetManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.clone(),
            line: e.line(),
            msg: e.to_string(),
        })?;
        if manifest.format != MANIFEST_FORMAT {
            return Err(Error::Parse {
                path,
                line: 1,
                msg: format!("not a dataset manifest (format '{}')", manifest.format),
            });
        }
        Ok((manifest, base))
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_atomic(&dir.join(MANIFEST_FILE), text.as_bytes())
    }

    /// Reads every graph of `split`, resolving paths against `base`.
    pub fn load_split(&self, base: &Path, split: Split) -> Result<Vec<LabeledGraph>> {
        self.files(split)
            .iter()
            .map(|f| read_graph(&base.join(f)))
            .collect()
    }
}

/// Generates `config.graphs.total()` labeled graphs into `out_dir` and
/// writes the manifest. Graph `i` uses seed `derive_seed(master_seed, i)`.
pub fn gen_dataset(config: &DatasetConfig, out_dir: &Path) -> Result<DatasetManifest> {
    gen_dataset_with_progress(config, out_dir, |_| {})
}

/// As [`gen_dataset`], calling `progress` with each file name once written.
pub fn gen_dataset_with_progress(
    config: &DatasetConfig,
    out_dir: &Path,
    mut progress: impl FnMut(&str),
) -> Result<DatasetManifest> {
    config.validate()?;
    let file_background = config
        .background_edges
        .as_deref()
        .map(read_edge_list)
        .transpose()?;

    let mut splits = Splits::default();
    let mut index = 0u64;
    for split in Split::ALL {
        for k in 0..config.graphs.get(split) {
            let graph_seed = derive_seed(config.master_seed, index);
            let bots = config.bot_sizes[index as usize % config.bot_sizes.len()];
            let lg = generate_one(config, file_background.as_ref(), bots, graph_seed)?;
            let name = format!("{split}_{k:04}.graph");
            write_graph(&out_dir.join(&name), &lg)?;
            progress(&name);
            match split {
                Split::Train => splits.train.push(name),
                Split::Val => splits.val.push(name),
                Split::Test => splits.test.push(name),
            }
            index += 1;
        }
    }

    let manifest = DatasetManifest {
        format: MANIFEST_FORMAT.to_string(),
        version: 1,
        config: config.clone(),
        splits,
        extra: BTreeMap::new(),
    };
    manifest.save(out_dir)?;
    Ok(manifest)
}

fn generate_one(
    config: &DatasetConfig,
    file_background: Option<&Graph>,
    bots: usize,
    seed: u64,
) -> Result<LabeledGraph> {
    let background = match file_background {
        Some(g) => g.clone(),
        None => {
            let edges =
                gen_background(config.n_background, config.avg_degree, derive_seed(seed, 0))?;
            Graph::from_edges(config.n_background, edges)?
        }
    };
    let botnet = gen_topology(
        config.topology,
        bots,
        config.kademlia_bucket,
        derive_seed(seed, 1),
    )?;
    let mut lg = overlay(
        &background,
        &botnet,
        bots,
        config.topology,
        derive_seed(seed, 2),
    )?;
    lg.meta.seed = seed;
    Ok(lg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_ratio() {
        assert_eq!(
            SplitSizes::from_total(960),
            SplitSizes {
                train: 768,
                val: 96,
                test: 96
            }
        );
        assert_eq!(SplitSizes::from_total(10).total(), 10);
        assert_eq!(SplitSizes::from_total(15).train, 13);
    }

    #[test]
    fn empty_config_rejected() {
        let mut cfg = DatasetConfig::desk(Topology::Chord, 1);
        cfg.bot_sizes.clear();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
