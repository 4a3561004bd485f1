#![allow(dead_code)]

use botnet_gnn::graph::build_graph;
use botnet_gnn::Graph;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spanning tree plus `extra` random edges; always connected.
pub fn random_connected(n: usize, extra: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    let mut edges = Vec::new();
    for k in 1..n {
        let parent = order[r.random_range(0..k)];
        edges.push((order[k], parent));
    }
    for _ in 0..extra {
        let u = r.random_range(0..n);
        let v = r.random_range(0..n);
        if u != v {
            edges.push((u, v));
        }
    }
    build_graph(&edges, n).unwrap()
}

pub fn random_perm(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng(seed));
    p
}
