use rand::seq::index;

use super::Topology;
use crate::seed::seeded_rng as rng;
use crate::{Error, Graph, Result};

/// Generation metadata carried in every graph file header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMeta {
    pub topology: Topology,
    pub seed: u64,
    pub bot_count: usize,
}

/// A graph with a per-node botnet bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<bool>,
    pub meta: GraphMeta,
}

impl LabeledGraph {
    /// Checks that labels cover every node and agree with `meta.bot_count`.
    pub fn new(graph: Graph, labels: Vec<bool>, meta: GraphMeta) -> Result<Self> {
        if labels.len() != graph.n() {
            return Err(Error::input(format!(
                "{} labels for a graph with {} nodes",
                labels.len(),
                graph.n()
            )));
        }
        let bots = labels.iter().filter(|&&b| b).count();
        if bots != meta.bot_count {
            return Err(Error::input(format!(
                "{bots} nodes labeled as bots but metadata says {}",
                meta.bot_count
            )));
        }
        Ok(LabeledGraph {
            graph,
            labels,
            meta,
        })
    }

    /// Sorted ids of bot nodes.
    pub fn bot_nodes(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }
}

/// Embeds a botnet on `bot_count` nodes into `background`: bot `i` is mapped
/// to the `i`-th of `bot_count` background ids drawn uniformly without
/// replacement, botnet edges are added to the background edges, and
/// duplicates collapse.
pub fn overlay(
    background: &Graph,
    botnet_edges: &[(usize, usize)],
    bot_count: usize,
    topology: Topology,
    seed: u64,
) -> Result<LabeledGraph> {
    let n = background.n();
    if bot_count > n {
        return Err(Error::input(format!(
            "cannot place {bot_count} bots in a background of {n} nodes"
        )));
    }
    if let Some(&(u, v)) = botnet_edges
        .iter()
        .find(|(u, v)| *u >= bot_count || *v >= bot_count)
    {
        return Err(Error::input(format!(
            "botnet edge ({u}, {v}) outside [0, {bot_count})"
        )));
    }
    let mut rng = rng(seed);
    let placement = index::sample(&mut rng, n, bot_count).into_vec();
    let mut labels = vec![false; n];
    for &p in &placement {
        labels[p] = true;
    }
    let edges = background.edges().chain(
        botnet_edges
            .iter()
            .map(|&(u, v)| (placement[u], placement[v])),
    );
    let graph = Graph::from_edges(n, edges)?;
    LabeledGraph::new(
        graph,
        labels,
        GraphMeta {
            topology,
            seed,
            bot_count,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::topo::{gen_background, gen_chord};

    fn background() -> Graph {
        build_graph(&gen_background(200, 6.0, 1).unwrap(), 200).unwrap()
    }

    #[test]
    fn empty_botnet_keeps_background() {
        let bg = background();
        let lg = overlay(&bg, &[], 5, Topology::None, 3).unwrap();
        assert_eq!(lg.graph, bg);
        assert_eq!(lg.bot_nodes().len(), 5);
    }

    #[test]
    fn union_semantics() {
        let bg = background();
        let chord = gen_chord(40).unwrap();
        let lg = overlay(&bg, &chord, 40, Topology::Chord, 9).unwrap();
        assert!(lg.graph.m() <= bg.m() + chord.len());
        assert!(bg.edges().all(|(u, v)| lg.graph.has_edge(u, v)));

        // Recover the placement by replaying the sampler.
        let placement = index::sample(&mut rng(9), 200, 40).into_vec();
        for &(u, v) in &chord {
            assert!(lg.graph.has_edge(placement[u], placement[v]));
            assert!(lg.labels[placement[u]] && lg.labels[placement[v]]);
        }
        assert_eq!(lg.meta.bot_count, 40);
    }

    #[test]
    fn too_many_bots() {
        let bg = build_graph(&[(0, 1)], 2).unwrap();
        assert!(matches!(
            overlay(&bg, &[], 3, Topology::None, 0),
            Err(Error::Input(_))
        ));
        assert!(overlay(&bg, &[(0, 2)], 2, Topology::None, 0).is_err());
    }

    #[test]
    fn label_count_checked() {
        let g = build_graph(&[(0, 1)], 2).unwrap();
        let meta = GraphMeta {
            topology: Topology::None,
            seed: 0,
            bot_count: 2,
        };
        assert!(LabeledGraph::new(g, vec![true, false], meta).is_err());
    }
}
