use std::collections::VecDeque;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::seed::seeded_rng;
use crate::Graph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathLengthOptions {
    /// Sources used when the component is larger than `exact_threshold`.
    pub sample_size: usize,
    pub seed: u64,
    /// Components up to this size use every node as a BFS source.
    pub exact_threshold: usize,
}

impl Default for PathLengthOptions {
    fn default() -> Self {
        PathLengthOptions {
            sample_size: 1000,
            seed: 0x5eed,
            exact_threshold: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathLengthReport {
    /// Mean hop distance over ordered pairs of distinct nodes in the largest
    /// component; `None` when that component is a single node.
    pub value: Option<f64>,
    pub exact: bool,
    pub sources: usize,
    pub component_nodes: usize,
    pub largest_component_only: bool,
}

/// Average shortest-path length on the largest connected component.
pub fn avg_path_length(g: &Graph, opts: &PathLengthOptions) -> PathLengthReport {
    let component = g.largest_component();
    let largest_component_only = component.len() < g.n();
    let owned;
    let h = if largest_component_only {
        owned = g
            .induced_subgraph(&component)
            .expect("component ids are distinct and in range");
        &owned
    } else {
        g
    };
    let n = h.n();

    let exact = n <= opts.exact_threshold || opts.sample_size >= n;
    let sources: Vec<usize> = if exact {
        (0..n).collect()
    } else {
        let mut rng = seeded_rng(opts.seed);
        let mut s = index::sample(&mut rng, n, opts.sample_size).into_vec();
        s.sort_unstable();
        s
    };

    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut total: u64 = 0;
    let mut pairs: u64 = 0;
    for &s in &sources {
        dist.fill(u32::MAX);
        dist[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            for &v in h.neighbors(u) {
                if dist[v] == u32::MAX {
                    dist[v] = du + 1;
                    total += u64::from(du + 1);
                    pairs += 1;
                    queue.push_back(v);
                }
            }
        }
    }

    PathLengthReport {
        value: (pairs > 0).then(|| total as f64 / pairs as f64),
        exact,
        sources: sources.len(),
        component_nodes: n,
        largest_component_only,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn apl(edges: &[(usize, usize)], n: usize) -> f64 {
        let g = build_graph(edges, n).unwrap();
        avg_path_length(&g, &PathLengthOptions::default())
            .value
            .unwrap()
    }

    #[test]
    fn complete_graph_is_one() {
        let edges: Vec<_> = (0..5)
            .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
            .collect();
        assert_eq!(apl(&edges, 5), 1.0);
    }

    #[test]
    fn cycle_five() {
        let edges: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        assert_eq!(apl(&edges, 5), 1.5);
    }

    #[test]
    fn path_three() {
        assert_eq!(apl(&[(0, 1), (1, 2)], 3), 4.0 / 3.0);
    }

    #[test]
    fn self_loops_ignored_and_components_flagged() {
        let g = build_graph(&[(0, 0), (0, 1), (1, 2), (3, 4)], 5).unwrap();
        let r = avg_path_length(&g, &PathLengthOptions::default());
        assert_eq!(r.value, Some(4.0 / 3.0));
        assert!(r.largest_component_only);
        let lonely = build_graph(&[], 2).unwrap();
        assert_eq!(
            avg_path_length(&lonely, &PathLengthOptions::default()).value,
            None
        );
    }
}
