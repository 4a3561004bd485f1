//! Logistic regression on per-node degree statistics.

use serde::{Deserialize, Serialize};

use super::Prediction;
use crate::topo::LabeledGraph;
use crate::{Error, Graph, Result, Tensor2};

pub const LR_FEATURES: usize = 4;
pub const LR_FORMAT: &str = "botnet-gnn-lr";
pub const LR_VERSION: u32 = 1;
const STD_FLOOR: f64 = 1e-12;

/// Per node: own degree, then mean, max and min degree over its neighbors.
/// Self-loops are ignored both as neighbors and in the degrees; isolated
/// nodes get all zeros.
pub fn lr_features(g: &Graph) -> Tensor2 {
    let loop_free_degree = |i: usize| g.degree(i) - usize::from(g.has_edge(i, i));
    let degrees: Vec<f64> = (0..g.n()).map(|i| loop_free_degree(i) as f64).collect();
    let mut out = Tensor2::zeros(g.n(), LR_FEATURES);
    for i in 0..g.n() {
        let mut count = 0usize;
        let (mut sum, mut max, mut min) = (0.0, f64::NEG_INFINITY, f64::INFINITY);
        for &j in g.neighbors(i).iter().filter(|&&j| j != i) {
            let d = degrees[j];
            count += 1;
            sum += d;
            max = max.max(d);
            min = min.min(d);
        }
        if count > 0 {
            out.row_mut(i)
                .copy_from_slice(&[degrees[i], sum / count as f64, max, min]);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrModel {
    pub format: String,
    pub version: u32,
    pub weights: [f64; LR_FEATURES],
    pub bias: f64,
    /// Training-split feature means and standard deviations.
    pub mean: [f64; LR_FEATURES],
    pub std: [f64; LR_FEATURES],
}

impl LrModel {
    fn standardize(&self, x: &mut Tensor2) {
        for r in 0..x.rows() {
            for (k, v) in x.row_mut(r).iter_mut().enumerate() {
                *v = (*v - self.mean[k]) / self.std[k];
            }
        }
    }

    pub fn predict_proba(&self, g: &Graph) -> Vec<f64> {
        let mut x = lr_features(g);
        self.standardize(&mut x);
        (0..x.rows())
            .map(|r| sigmoid(dot(&self.weights, x.row(r)) + self.bias))
            .collect()
    }

    pub fn predict(&self, g: &Graph, threshold: f64) -> Prediction {
        let probs = self.predict_proba(g);
        let labels = probs.iter().map(|&p| p >= threshold).collect();
        Prediction { probs, labels }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Config(format!("serializing model: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: LrModel = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed LR model file: {e}")))?;
        if m.format != LR_FORMAT || m.version != LR_VERSION {
            return Err(Error::Config(format!(
                "not an LR model file (format '{}' version {})",
                m.format, m.version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        crate::io_util::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&crate::io_util::read_to_string(path)?)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean logistic loss of `theta = [w₀..w₃, bias]` on standardized features,
/// with its gradient.
pub fn logistic_loss(
    theta: &[f64; LR_FEATURES + 1],
    x: &Tensor2,
    y: &[bool],
) -> (f64, [f64; LR_FEATURES + 1]) {
    let n = x.rows().max(1) as f64;
    let mut loss = 0.0;
    let mut grad = [0.0; LR_FEATURES + 1];
    for (r, &label) in y.iter().enumerate() {
        let row = x.row(r);
        let z = dot(&theta[..LR_FEATURES], row) + theta[LR_FEATURES];
        // log(1 + e^z) − y·z, written to avoid overflow
        let softplus = if z > 0.0 {
            z + (-z).exp().ln_1p()
        } else {
            z.exp().ln_1p()
        };
        let t = f64::from(u8::from(label));
        loss += softplus - t * z;
        let d = sigmoid(z) - t;
        for k in 0..LR_FEATURES {
            grad[k] += d * row[k];
        }
        grad[LR_FEATURES] += d;
    }
    grad.iter_mut().for_each(|g| *g /= n);
    (loss / n, grad)
}

/// Full-batch gradient descent from zero on standardized features of every
/// node in `train`.
pub fn train_lr(train: &[LabeledGraph], epochs: usize, lr: f64) -> Result<LrModel> {
    if train.is_empty() {
        return Err(Error::input("LR training needs at least one graph"));
    }
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::Config("LR learning rate must be positive".into()));
    }
    let total: usize = train.iter().map(|g| g.graph.n()).sum();
    let mut x = Tensor2::zeros(total, LR_FEATURES);
    let mut y = Vec::with_capacity(total);
    let mut row = 0;
    for lg in train {
        let f = lr_features(&lg.graph);
        for r in 0..f.rows() {
            x.row_mut(row).copy_from_slice(f.row(r));
            row += 1;
        }
        y.extend_from_slice(&lg.labels);
    }

    let n = total.max(1) as f64;
    let mut mean = [0.0; LR_FEATURES];
    let mut std = [0.0; LR_FEATURES];
    for r in 0..total {
        for (k, v) in x.row(r).iter().enumerate() {
            mean[k] += v / n;
        }
    }
    for r in 0..total {
        for (k, v) in x.row(r).iter().enumerate() {
            std[k] += (v - mean[k]).powi(2) / n;
        }
    }
    std.iter_mut().for_each(|s| *s = s.sqrt().max(STD_FLOOR));

    let mut model = LrModel {
        format: LR_FORMAT.into(),
        version: LR_VERSION,
        weights: [0.0; LR_FEATURES],
        bias: 0.0,
        mean,
        std,
    };
    model.standardize(&mut x);

    let mut theta = [0.0; LR_FEATURES + 1];
    for epoch in 0..epochs {
        let (loss, grad) = logistic_loss(&theta, &x, &y);
        if !loss.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite LR loss at epoch {epoch}"
            )));
        }
        for (t, g) in theta.iter_mut().zip(grad) {
            *t -= lr * g;
        }
    }
    model.weights.copy_from_slice(&theta[..LR_FEATURES]);
    model.bias = theta[LR_FEATURES];
    Ok(model)
}
