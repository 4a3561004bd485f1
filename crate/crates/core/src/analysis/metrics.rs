use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Confusion counts and the derived detection rates. Rates are
/// percentages; `f1` is a ratio in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fp_rate: f64,
    pub fn_rate: f64,
    pub det_rate: f64,
    pub f1: f64,
    /// Set when a rate had an empty denominator (no true positives or no
    /// true negatives) and was reported as 0.
    pub degenerate: bool,
}

impl MetricsReport {
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        let pct = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                100.0 * num as f64 / den as f64
            }
        };
        let positives = tp + fn_;
        let fn_rate = pct(fn_, positives);
        // Kept as an exact complement even when there are no positives.
        let det_rate = 100.0 - fn_rate;
        let f1_den = 2 * tp + fp + fn_;
        MetricsReport {
            tp,
            fp,
            tn,
            fn_,
            fp_rate: pct(fp, fp + tn),
            fn_rate,
            det_rate,
            f1: if f1_den == 0 {
                0.0
            } else {
                2.0 * tp as f64 / f1_den as f64
            },
            degenerate: positives == 0 || fp + tn == 0,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Flat `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("tp", self.tp.to_string()),
            ("fp", self.fp.to_string()),
            ("tn", self.tn.to_string()),
            ("fn", self.fn_.to_string()),
            ("fp_rate", format!("{:.6}", self.fp_rate)),
            ("fn_rate", format!("{:.6}", self.fn_rate)),
            ("det_rate", format!("{:.6}", self.det_rate)),
            ("f1", format!("{:.6}", self.f1)),
            ("degenerate", self.degenerate.to_string()),
        ] {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }
}

/// Confusion counts of `predicted` against `truth`.
pub fn compute_metrics(predicted: &[bool], truth: &[bool]) -> Result<MetricsReport> {
    if predicted.len() != truth.len() {
        return Err(Error::input(format!(
            "{} predictions for {} labels",
            predicted.len(),
            truth.len()
        )));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    Ok(MetricsReport::from_counts(tp, fp, tn, fn_))
}

/// Per-graph macro average: every rate and F1 is the unweighted mean across
/// reports; counts are summed. `None` for an empty slice.
pub fn aggregate_metrics(reports: &[MetricsReport]) -> Option<MetricsReport> {
    if reports.is_empty() {
        return None;
    }
    let k = reports.len() as f64;
    let mean = |f: fn(&MetricsReport) -> f64| reports.iter().map(f).sum::<f64>() / k;
    Some(MetricsReport {
        tp: reports.iter().map(|r| r.tp).sum(),
        fp: reports.iter().map(|r| r.fp).sum(),
        tn: reports.iter().map(|r| r.tn).sum(),
        fn_: reports.iter().map(|r| r.fn_).sum(),
        fp_rate: mean(|r| r.fp_rate),
        fn_rate: mean(|r| r.fn_rate),
        det_rate: mean(|r| r.det_rate),
        f1: mean(|r| r.f1),
        degenerate: reports.iter().any(|r| r.degenerate),
    })
}
