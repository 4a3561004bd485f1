//! Botnet overlay topologies, synthetic background graphs, overlay embedding
//! and the on-disk dataset layout.

mod dataset;
mod format;
mod generators;
mod overlay;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use dataset::{
    gen_dataset, gen_dataset_with_progress, DatasetConfig, DatasetManifest, Split, SplitSizes,
    MANIFEST_FILE,
};
pub use format::{format_graph, parse_graph, read_edge_list, read_graph, write_graph};
pub use generators::{
    gen_background, gen_chord, gen_debruijn, gen_kademlia, gen_leet_chord, gen_topology,
    DEFAULT_KADEMLIA_BUCKET,
};
pub use overlay::{overlay, GraphMeta, LabeledGraph};

/// Kind of botnet overlay embedded in a labeled graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    DeBruijn,
    Chord,
    Kademlia,
    LeetChord,
    /// No overlay, e.g. a bare background graph.
    None,
}

impl Topology {
    /// The overlay kinds that can be synthesized.
    pub const SYNTHETIC: [Topology; 4] = [
        Topology::DeBruijn,
        Topology::Chord,
        Topology::Kademlia,
        Topology::LeetChord,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Topology::DeBruijn => "debruijn",
            Topology::Chord => "chord",
            Topology::Kademlia => "kademlia",
            Topology::LeetChord => "leet-chord",
            Topology::None => "none",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Topology::SYNTHETIC
            .into_iter()
            .chain([Topology::None])
            .find(|t| t.as_str() == s)
            .ok_or_else(|| {
                Error::input(format!(
                    "unknown topology '{s}' (expected one of debruijn, chord, kademlia, leet-chord)"
                ))
            })
    }
}
