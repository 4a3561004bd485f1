use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{avg_path_length, lambda2, PathLengthOptions, SpectralOptions};
use crate::topo::LabeledGraph;
use crate::{Error, Graph, Result};

/// Spectral and path-length diagnostics for one graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub n: usize,
    pub m: usize,
    pub components: usize,
    /// Second eigenvalue of the walk matrix on the largest component.
    pub lambda2: Option<f64>,
    pub lambda2_iterations: usize,
    pub avg_path_length: Option<f64>,
    pub path_length_exact: bool,
    pub largest_component_only: bool,
    pub bipartite: bool,
    /// No component with an edge: neither diagnostic is defined.
    pub degenerate: bool,
}

impl TopologyReport {
    pub fn to_key_values(&self, prefix: &str) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |x| format!("{x:.6}"));
        let mut s = String::new();
        for (k, v) in [
            ("n", self.n.to_string()),
            ("m", self.m.to_string()),
            ("components", self.components.to_string()),
            ("lambda2", opt(self.lambda2)),
            ("lambda2_iterations", self.lambda2_iterations.to_string()),
            ("avg_path_length", opt(self.avg_path_length)),
            ("path_length_exact", self.path_length_exact.to_string()),
            (
                "largest_component_only",
                self.largest_component_only.to_string(),
            ),
            ("bipartite", self.bipartite.to_string()),
            ("degenerate", self.degenerate.to_string()),
        ] {
            let _ = writeln!(s, "{prefix}{k}={v}");
        }
        s
    }
}

pub fn topology_report(
    g: &Graph,
    spectral: &SpectralOptions,
    paths: &PathLengthOptions,
) -> Result<TopologyReport> {
    let (_, components) = g.components();
    let largest = g.largest_component();
    let degenerate = largest.len() < 2;
    let (lambda2_value, iterations, bipartite) = if degenerate {
        (None, 0, false)
    } else {
        let r = lambda2(g, spectral)?;
        (Some(r.value), r.iterations, r.bipartite)
    };
    let apl = avg_path_length(g, paths);
    Ok(TopologyReport {
        n: g.n(),
        m: g.m(),
        components,
        lambda2: lambda2_value,
        lambda2_iterations: iterations,
        avg_path_length: apl.value,
        path_length_exact: apl.exact,
        largest_component_only: components > 1,
        bipartite,
        degenerate,
    })
}

/// Diagnostics of the botnet-induced subgraph next to those of the whole graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingSummary {
    pub botnet: TopologyReport,
    pub full: TopologyReport,
}

impl MixingSummary {
    pub fn to_key_values(&self) -> String {
        self.botnet.to_key_values("botnet.") + &self.full.to_key_values("full.")
    }
}

pub fn mixing_summary(
    lg: &LabeledGraph,
    spectral: &SpectralOptions,
    paths: &PathLengthOptions,
) -> Result<MixingSummary> {
    let bots = lg.bot_nodes();
    if bots.len() < 2 {
        return Err(Error::input(format!(
            "mixing summary needs at least 2 bots, graph has {}",
            bots.len()
        )));
    }
    let induced = lg.graph.induced_subgraph(&bots)?;
    Ok(MixingSummary {
        botnet: topology_report(&induced, spectral, paths)?,
        full: topology_report(&lg.graph, spectral, paths)?,
    })
}
