//! Synthetic botnet overlay graphs and a purely topological graph neural
//! network detector.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] holds the immutable compressed adjacency, degree bookkeeping,
//!   adjacency normalizations and the sparse-dense product.
//! * [`topo`] generates P2P overlay topologies and heavy-tailed background
//!   graphs, embeds one into the other and reads/writes labeled graphs.
//! * [`nn`] is a small reverse-mode engine specialised to the detector's
//!   fixed architecture.
//! * [`detector`] is the GNN itself plus the degree-feature logistic
//!   regression baseline.
//! * [`analysis`] computes detection metrics and topology diagnostics
//!   (second eigenvalue of the walk matrix, average path length).

pub mod analysis;
pub mod detector;
mod error;
pub mod graph;
pub mod io_util;
pub mod nn;
mod seed;
pub mod tensor;
pub mod topo;

pub use error::{Error, Result};
pub use graph::{Graph, NormMode, NormalizedAdjacency};
pub use seed::derive_seed;
pub use tensor::Tensor2;
