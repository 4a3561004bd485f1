//! The botnet GNN and the degree-feature logistic-regression baseline.

mod baseline;
mod gnn;
mod train;

pub use baseline::{logistic_loss, lr_features, train_lr, LrModel, LR_FEATURES, LR_FORMAT};
pub use gnn::{
    gnn_forward, predict, GnnConfig, InputMode, ModelFile, ModelParams, NamedTensor, Prediction,
    MODEL_FORMAT, MODEL_VERSION,
};
pub use train::{
    prepare, train, train_prepared, train_with_progress, EpochRecord, PreparedGraph, Schedule,
    ScheduleStep, TrainConfig, TrainOutcome,
};

use crate::analysis::{aggregate_metrics, compute_metrics, MetricsReport};
use crate::topo::LabeledGraph;
use crate::{Error, Result};

/// Either kind of trained model, as read from disk.
#[derive(Clone, Debug)]
pub enum Detector {
    Gnn(ModelParams),
    Lr(LrModel),
}

impl Detector {
    /// Dispatches on the `format` field of a model file.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = crate::io_util::read_to_string(path)?;
        #[derive(serde::Deserialize)]
        struct Probe {
            format: String,
        }
        let probe: Probe = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: not a model file: {e}", path.display())))?;
        match probe.format.as_str() {
            MODEL_FORMAT => Ok(Detector::Gnn(ModelParams::from_json(&text)?)),
            LR_FORMAT => Ok(Detector::Lr(LrModel::from_json(&text)?)),
            other => Err(Error::Config(format!(
                "{}: unknown model format '{other}'",
                path.display()
            ))),
        }
    }

    /// Predicts on a raw graph; self-loops are added for the GNN.
    pub fn predict(&self, lg: &LabeledGraph, threshold: f64) -> Result<Prediction> {
        match self {
            Detector::Gnn(p) => predict(p, &lg.graph.add_self_loops(), threshold),
            Detector::Lr(m) => Ok(m.predict(&lg.graph, threshold)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvalReport {
    pub per_graph: Vec<MetricsReport>,
    pub aggregate: MetricsReport,
}

/// Per-graph metrics and their macro-average.
pub fn evaluate(
    detector: &Detector,
    graphs: &[LabeledGraph],
    threshold: f64,
) -> Result<EvalReport> {
    if graphs.is_empty() {
        return Err(Error::input("evaluation needs at least one graph"));
    }
    let per_graph = graphs
        .iter()
        .map(|lg| compute_metrics(&detector.predict(lg, threshold)?.labels, &lg.labels))
        .collect::<Result<Vec<_>>>()?;
    let aggregate = aggregate_metrics(&per_graph).expect("non-empty");
    Ok(EvalReport {
        per_graph,
        aggregate,
    })
}
