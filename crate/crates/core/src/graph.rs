//! Immutable undirected graphs in compressed adjacency form, plus the
//! normalized adjacency operators the detector aggregates through.
//!
//! Self-loop convention: a loop `(i, i)` is stored once in `neighbors(i)` and
//! contributes exactly 1 to `d_i`. Every normalization denominator below uses
//! this degree.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tensor2};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    self_loops: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

/// Builds an undirected graph on `n` nodes from an edge list. Both
/// orientations and repeated pairs collapse into a single edge.
pub fn build_graph(edges: &[(usize, usize)], n: usize) -> Result<Graph> {
    Graph::from_edges(n, edges.iter().copied())
}

impl Graph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge ({u}, {v}) references a node outside [0, {n})"
                )));
            }
            adj[u].push(v);
            if u != v {
                adj[v].push(u);
            }
        }
        Ok(Self::from_adjacency(adj))
    }

    /// Canonicalises raw (possibly unsorted, duplicated) but already
    /// symmetric adjacency lists.
    fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        let mut self_loops = 0;
        for (i, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.binary_search(&i).is_ok() {
                self_loops += 1;
            }
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        let m = (neighbors.len() - self_loops) / 2 + self_loops;
        Graph {
            n,
            m,
            self_loops,
            offsets,
            neighbors,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected edges, each self-loop counted once.
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn self_loop_count(&self) -> usize {
        self.self_loops
    }

    /// True when every node carries a self-loop.
    pub fn has_self_loops(&self) -> bool {
        self.self_loops == self.n
    }

    /// Stored adjacency entries: `2m - loops`.
    pub fn nnz(&self) -> usize {
        self.neighbors.len()
    }

    /// Undirected edges as `(u, v)` with `u <= v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| v >= u)
                .map(move |v| (u, v))
        })
    }

    /// Returns a graph with a self-loop on every node. Idempotent.
    pub fn add_self_loops(&self) -> Graph {
        if self.has_self_loops() {
            return self.clone();
        }
        let adj = (0..self.n)
            .map(|i| {
                let mut list = self.neighbors(i).to_vec();
                if let Err(pos) = list.binary_search(&i) {
                    list.insert(pos, i);
                }
                list
            })
            .collect();
        Self::from_adjacency(adj)
    }

    /// Relabels node `u` as `perm[u]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        check_permutation(perm, self.n)?;
        let mut adj = vec![Vec::new(); self.n];
        for u in 0..self.n {
            adj[perm[u]] = self.neighbors(u).iter().map(|&v| perm[v]).collect();
        }
        Ok(Self::from_adjacency(adj))
    }

    /// Subgraph induced by `nodes`; node `nodes[k]` becomes node `k`.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            if v >= self.n {
                return Err(Error::input(format!("node {v} outside [0, {})", self.n)));
            }
            if index[v] != usize::MAX {
                return Err(Error::input(format!("node {v} listed twice")));
            }
            index[v] = k;
        }
        let adj = nodes
            .iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                    .collect()
            })
            .collect();
        Ok(Self::from_adjacency(adj))
    }

    /// Connected component id per node (ids assigned in order of the
    /// smallest node in each component) and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Sorted node ids of the largest connected component (lowest id wins ties).
    pub fn largest_component(&self) -> Vec<usize> {
        let (comp, count) = self.components();
        if count == 0 {
            return Vec::new();
        }
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = (0..count)
            .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
            .unwrap();
        (0..self.n).filter(|&v| comp[v] == best).collect()
    }

    /// Two-colouring check; any self-loop makes a graph non-bipartite.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.n];
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if color[v] == u8::MAX {
                        color[v] = 1 - color[u];
                        queue.push_back(v);
                    } else if color[v] == color[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Normalized adjacency operator for `mode`.
    pub fn normalize(&self, mode: NormMode) -> NormalizedAdjacency {
        NormalizedAdjacency::new(self, mode)
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::input(format!(
            "permutation has length {}, graph has {n} nodes",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::input(format!(
                "not a bijection on [0, {n}): image {p}"
            )));
        }
    }
    Ok(())
}

/// How an adjacency entry `a_ij` (row = receiver `i`, column = sender `j`)
/// is scaled before aggregation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMode {
    /// `a_ij / d_j`: each message is weighted by the inverse degree of the
    /// node that sent it. Columns sum to one.
    SourceDegree,
    /// `a_ij / sqrt(d_i d_j)`.
    Symmetric,
    /// `a_ij / d_i`, the walk transition matrix `D⁻¹A`. Rows sum to one, so
    /// it maps a constant vector to itself.
    RowStochastic,
}

impl NormMode {
    pub const ALL: [NormMode; 3] = [
        NormMode::SourceDegree,
        NormMode::Symmetric,
        NormMode::RowStochastic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NormMode::SourceDegree => "source-degree",
            NormMode::Symmetric => "symmetric",
            NormMode::RowStochastic => "row-stochastic",
        }
    }

    #[inline]
    fn weight(self, di: usize, dj: usize) -> f64 {
        match self {
            NormMode::SourceDegree => 1.0 / dj as f64,
            NormMode::Symmetric => 1.0 / ((di as f64) * (dj as f64)).sqrt(),
            NormMode::RowStochastic => 1.0 / di as f64,
        }
    }
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NormMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::input(format!(
                    "unknown normalization '{s}' (expected source-degree, symmetric or row-stochastic)"
                ))
            })
    }
}

/// Sparse `n x n` operator sharing the sparsity pattern of its graph.
///
/// `values[k]` is the entry at the `k`-th stored position (row `i`, column
/// `j`); `values_t[k]` is the entry at the mirrored position `(j, i)`, which
/// the symmetric pattern guarantees to exist. Products with the transpose
/// therefore walk the same rows in the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedAdjacency {
    mode: NormMode,
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
    values_t: Vec<f64>,
}

impl NormalizedAdjacency {
    pub fn new(g: &Graph, mode: NormMode) -> Self {
        let mut values = Vec::with_capacity(g.nnz());
        let mut values_t = Vec::with_capacity(g.nnz());
        for i in 0..g.n {
            let di = g.degree(i);
            for &j in g.neighbors(i) {
                let dj = g.degree(j);
                values.push(mode.weight(di, dj));
                values_t.push(mode.weight(dj, di));
            }
        }
        NormalizedAdjacency {
            mode,
            n: g.n,
            offsets: g.offsets.clone(),
            cols: g.neighbors.clone(),
            values,
            values_t,
        }
    }

    pub fn mode(&self) -> NormMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Entry `(i, j)`, zero when the pair is not adjacent.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.offsets[i]..self.offsets[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.values[self.offsets[i] + k],
            Err(_) => 0.0,
        }
    }

    /// Stored `(row, col, value)` triples in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.offsets[i]..self.offsets[i + 1]).map(move |k| (i, self.cols[k], self.values[k]))
        })
    }

    pub fn to_dense(&self) -> Tensor2 {
        let mut out = Tensor2::zeros(self.n, self.n);
        for (i, j, v) in self.triples() {
            out.set(i, j, v);
        }
        out
    }

    /// `Ā · x`. Each output row is accumulated over neighbors in ascending
    /// id order, so the result is bitwise reproducible for a fixed graph.
    pub fn spmm(&self, x: &Tensor2) -> Result<Tensor2> {
        self.product(x, &self.values)
    }

    /// `Āᵀ · x`, the adjoint used to backpropagate through [`spmm`](Self::spmm).
    pub fn spmm_transpose(&self, x: &Tensor2) -> Result<Tensor2> {
        self.product(x, &self.values_t)
    }

    fn product(&self, x: &Tensor2, values: &[f64]) -> Result<Tensor2> {
        if x.rows() != self.n {
            return Err(Error::input(format!(
                "spmm: operator is {n}x{n} but dense operand has {} rows",
                x.rows(),
                n = self.n
            )));
        }
        let h = x.cols();
        let mut out = Tensor2::zeros(self.n, h);
        for i in 0..self.n {
            let o = out.row_mut(i);
            let range = self.offsets[i]..self.offsets[i + 1];
            for (&w, &c) in values[range.clone()].iter().zip(&self.cols[range]) {
                for (ov, &xv) in o.iter_mut().zip(x.row(c)) {
                    *ov += w * xv;
                }
            }
        }
        Ok(out)
    }
}
