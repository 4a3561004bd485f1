//! Detection metrics and topology diagnostics.

mod metrics;
mod paths;
mod report;
mod spectral;

pub use metrics::{aggregate_metrics, compute_metrics, MetricsReport};
pub use paths::{avg_path_length, PathLengthOptions, PathLengthReport};
pub use report::{mixing_summary, topology_report, MixingSummary, TopologyReport};
pub use spectral::{lambda2, Lambda2Mode, Lambda2Report, SpectralOptions};
