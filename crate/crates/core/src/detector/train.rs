use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{GnnConfig, ModelParams, Prediction};
use crate::analysis::{aggregate_metrics, compute_metrics, MetricsReport};
use crate::nn::{adam_step, softmax_cross_entropy, AdamConfig, Tape};
use crate::seed::seeded_rng;
use crate::topo::LabeledGraph;
use crate::{derive_seed, Error, NormMode, NormalizedAdjacency, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub weight_decay: f64,
    pub lr_decay_factor: f64,
    /// Epochs without a new best validation loss before the lr is decayed.
    pub plateau_patience: usize,
    /// Epochs without a new best validation loss before training stops.
    pub early_stop_patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub class_weights: [f64; 2],
    pub threshold: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 0.005,
            weight_decay: 5e-4,
            lr_decay_factor: 0.25,
            plateau_patience: 1,
            early_stop_patience: 5,
            max_epochs: 50,
            seed: 0,
            class_weights: [1.0, 1.0],
            threshold: 0.5,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be positive");
        }
        if self.weight_decay.is_nan() || self.weight_decay < 0.0 {
            return bad("weight_decay must be non-negative");
        }
        if !(self.lr_decay_factor > 0.0 && self.lr_decay_factor < 1.0) {
            return bad("lr_decay_factor must lie in (0, 1)");
        }
        if self.plateau_patience == 0 || self.early_stop_patience == 0 {
            return bad("patience values must be at least 1");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        if !self.class_weights.iter().all(|w| *w > 0.0 && w.is_finite()) {
            return bad("class weights must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Learning rate used during this epoch.
    pub lr: f64,
    pub train_loss: f64,
    pub val_loss: f64,
    pub val: MetricsReport,
    pub improved: bool,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
}

/// A labeled graph with self-loops added and its normalized adjacency.
pub struct PreparedGraph {
    pub adj: NormalizedAdjacency,
    pub labels: Vec<bool>,
}

impl PreparedGraph {
    pub fn new(lg: &LabeledGraph, mode: NormMode) -> Self {
        PreparedGraph {
            adj: lg.graph.add_self_loops().normalize(mode),
            labels: lg.labels.clone(),
        }
    }
}

pub fn prepare(graphs: &[LabeledGraph], mode: NormMode) -> Vec<PreparedGraph> {
    graphs.iter().map(|g| PreparedGraph::new(g, mode)).collect()
}

/// Trains with one Adam step per training graph per epoch, in a seeded
/// shuffled order, and returns the parameters with the lowest mean
/// validation loss.
pub fn train(
    train: &[LabeledGraph],
    val: &[LabeledGraph],
    gnn: &GnnConfig,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    train_with_progress(train, val, gnn, cfg, |_| {})
}

pub fn train_with_progress(
    train: &[LabeledGraph],
    val: &[LabeledGraph],
    gnn: &GnnConfig,
    cfg: &TrainConfig,
    progress: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    gnn.validate()?;
    cfg.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(Error::input(format!(
            "training needs at least one graph per split (train {}, val {})",
            train.len(),
            val.len()
        )));
    }
    let train = prepare(train, gnn.norm);
    let val = prepare(val, gnn.norm);
    train_prepared(&train, &val, gnn, cfg, progress)
}

pub fn train_prepared(
    train: &[PreparedGraph],
    val: &[PreparedGraph],
    gnn: &GnnConfig,
    cfg: &TrainConfig,
    mut progress: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome> {
    gnn.validate()?;
    cfg.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(Error::input("training needs at least one graph per split"));
    }
    let mut params = ModelParams::init(*gnn, derive_seed(cfg.seed, 0))?;
    let mut rng = seeded_rng(derive_seed(cfg.seed, 1));
    let mut adam = AdamConfig {
        lr: cfg.lr,
        weight_decay: cfg.weight_decay,
        ..AdamConfig::default()
    };

    let mut best = (params.clone(), 0);
    let mut schedule = Schedule::new(cfg);
    let mut history = Vec::new();
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut train_loss = 0.0;
        for &gi in &order {
            let pg = &train[gi];
            let mut tape = Tape::new();
            let out = params.forward_tape(params.store(), &mut tape, &pg.adj)?;
            let (loss, grad) =
                softmax_cross_entropy(tape.value(out), &pg.labels, cfg.class_weights)?;
            if !loss.is_finite() {
                return Err(Error::Numerical(format!(
                    "non-finite training loss at epoch {epoch}, training graph {gi}"
                )));
            }
            tape.backward(out, grad, params.store_mut())?;
            if params.store().iter().any(|(_, p)| !p.grad.is_finite()) {
                return Err(Error::Numerical(format!(
                    "non-finite gradient at epoch {epoch}, training graph {gi}"
                )));
            }
            adam_step(params.store_mut(), &adam);
            train_loss += loss;
        }
        train_loss /= train.len() as f64;

        let (val_loss, val_metrics) = evaluate_prepared(&params, val, cfg)?;
        if !val_loss.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite validation loss at epoch {epoch}"
            )));
        }
        let step = schedule.observe(val_loss);
        let record = EpochRecord {
            epoch,
            lr: adam.lr,
            train_loss,
            val_loss,
            val: val_metrics,
            improved: step.improved,
        };
        progress(&record);
        history.push(record);

        if step.improved {
            best = (params.clone(), epoch);
        }
        if step.stop {
            break;
        }
        if step.decay {
            adam.lr *= cfg.lr_decay_factor;
        }
    }
    Ok(TrainOutcome {
        params: best.0,
        history,
        best_epoch: best.1,
    })
}

/// What to do after an epoch with a given validation loss.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduleStep {
    pub improved: bool,
    pub decay: bool,
    pub stop: bool,
}

/// Plateau decay and early stopping on validation loss. An epoch counts as
/// bad unless it sets a strictly lower loss than every earlier epoch.
#[derive(Clone, Debug)]
pub struct Schedule {
    best: f64,
    since_best: usize,
    since_decay: usize,
    plateau_patience: usize,
    early_stop_patience: usize,
}

impl Schedule {
    pub fn new(cfg: &TrainConfig) -> Self {
        Schedule {
            best: f64::INFINITY,
            since_best: 0,
            since_decay: 0,
            plateau_patience: cfg.plateau_patience,
            early_stop_patience: cfg.early_stop_patience,
        }
    }

    pub fn observe(&mut self, val_loss: f64) -> ScheduleStep {
        if val_loss < self.best {
            self.best = val_loss;
            self.since_best = 0;
            self.since_decay = 0;
            return ScheduleStep {
                improved: true,
                decay: false,
                stop: false,
            };
        }
        self.since_best += 1;
        self.since_decay += 1;
        let stop = self.since_best >= self.early_stop_patience;
        let decay = !stop && self.since_decay >= self.plateau_patience;
        if decay {
            self.since_decay = 0;
        }
        ScheduleStep {
            improved: false,
            decay,
            stop,
        }
    }
}

/// Mean unweighted-by-size loss and aggregated metrics over prepared graphs.
fn evaluate_prepared(
    params: &ModelParams,
    graphs: &[PreparedGraph],
    cfg: &TrainConfig,
) -> Result<(f64, MetricsReport)> {
    let mut total = 0.0;
    let mut reports = Vec::with_capacity(graphs.len());
    for pg in graphs {
        let logits = params.logits(&pg.adj)?;
        total += softmax_cross_entropy(&logits, &pg.labels, cfg.class_weights)?.0;
        let pred = Prediction::from_logits(&logits, cfg.threshold);
        reports.push(compute_metrics(&pred.labels, &pg.labels)?);
    }
    let agg = aggregate_metrics(&reports).expect("at least one graph");
    Ok((total / graphs.len() as f64, agg))
}
