use serde::{Deserialize, Serialize};

use crate::nn::{softmax, ParamId, ParamStore, Tape, Var};
use crate::seed::seeded_rng;
use crate::{Error, Graph, NormMode, NormalizedAdjacency, Result, Tensor2};
use rand::RngExt;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputMode {
    /// Every node starts from the scalar feature 1.
    #[default]
    AllOnes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnnConfig {
    pub num_layers: usize,
    pub hidden: usize,
    pub norm: NormMode,
    #[serde(default)]
    pub input: InputMode,
}

impl Default for GnnConfig {
    fn default() -> Self {
        GnnConfig {
            num_layers: 12,
            hidden: 32,
            norm: NormMode::SourceDegree,
            input: InputMode::AllOnes,
        }
    }
}

impl GnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_layers == 0 {
            return Err(Error::Config("num_layers must be at least 1".into()));
        }
        if self.hidden == 0 {
            return Err(Error::Config("hidden width must be at least 1".into()));
        }
        Ok(())
    }

    fn input_width(&self) -> usize {
        match self.input {
            InputMode::AllOnes => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct LayerIds {
    w: ParamId,
    u: ParamId,
    bias: ParamId,
}

/// Weights of the detector: per layer `W` (aggregation branch), `U`
/// (residual branch) and a bias, then a linear classifier to two logits.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    config: GnnConfig,
    store: ParamStore,
    layers: Vec<LayerIds>,
    out_w: ParamId,
    out_bias: ParamId,
}

fn uniform(rows: usize, cols: usize, bound: f64, rng: &mut impl rand::Rng) -> Tensor2 {
    let values = (0..rows * cols)
        .map(|_| rng.random_range(-bound..=bound))
        .collect();
    Tensor2::from_vec(rows, cols, values).expect("sized above")
}

impl ModelParams {
    /// Uniform `±1/√fan_in` initialization.
    pub fn init(config: GnnConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = seeded_rng(seed);
        let mut store = ParamStore::new();
        let h = config.hidden;
        let mut fan_in = config.input_width();
        let mut layers = Vec::with_capacity(config.num_layers);
        for l in 1..=config.num_layers {
            let bound = 1.0 / (fan_in as f64).sqrt();
            let w = store.add(format!("layer{l}.w"), uniform(fan_in, h, bound, &mut rng));
            let u = store.add(format!("layer{l}.u"), uniform(fan_in, h, bound, &mut rng));
            let bias = store.add(format!("layer{l}.bias"), uniform(1, h, bound, &mut rng));
            layers.push(LayerIds { w, u, bias });
            fan_in = h;
        }
        let bound = 1.0 / (h as f64).sqrt();
        let out_w = store.add("out.w", uniform(h, 2, bound, &mut rng));
        let out_bias = store.add("out.bias", uniform(1, 2, bound, &mut rng));
        Ok(ModelParams {
            config,
            store,
            layers,
            out_w,
            out_bias,
        })
    }

    pub fn config(&self) -> &GnnConfig {
        &self.config
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut ParamStore {
        &mut self.store
    }

    /// Records the forward pass on `tape` and returns the logits variable.
    pub fn forward_tape<'a>(
        &self,
        store: &ParamStore,
        tape: &mut Tape<'a>,
        adj: &'a NormalizedAdjacency,
    ) -> Result<Var> {
        if adj.mode() != self.config.norm {
            return Err(Error::Config(format!(
                "model expects {} normalization, adjacency uses {}",
                self.config.norm,
                adj.mode()
            )));
        }
        let mut x = tape.leaf(Tensor2::ones(adj.n(), self.config.input_width()));
        for layer in &self.layers {
            let residual = tape.affine(store, x, layer.u, Some(layer.bias))?;
            let agg = tape.aggregate(adj, x)?;
            let agg = tape.affine(store, agg, layer.w, None)?;
            let agg = tape.relu(agg);
            let sum = tape.add(residual, agg)?;
            x = tape.relu(sum);
        }
        tape.affine(store, x, self.out_w, Some(self.out_bias))
    }

    /// Logits for a prepared adjacency.
    pub fn logits(&self, adj: &NormalizedAdjacency) -> Result<Tensor2> {
        let mut tape = Tape::new();
        let out = self.forward_tape(&self.store, &mut tape, adj)?;
        Ok(tape.into_value(out))
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            config: self.config,
            tensors: self
                .store
                .iter()
                .map(|(name, p)| NamedTensor {
                    name: name.to_string(),
                    tensor: p.value.clone(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: ModelFile) -> Result<Self> {
        if file.format != MODEL_FORMAT {
            return Err(Error::Config(format!(
                "not a GNN model file (format '{}')",
                file.format
            )));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::Config(format!(
                "unsupported model version {} (expected {MODEL_VERSION})",
                file.version
            )));
        }
        let mut params = ModelParams::init(file.config, 0)?;
        if file.tensors.len() != params.store.len() {
            return Err(Error::Config(format!(
                "model file has {} tensors, configuration needs {}",
                file.tensors.len(),
                params.store.len()
            )));
        }
        let ids: Vec<ParamId> = params.store.ids().collect();
        for (id, nt) in ids.into_iter().zip(file.tensors) {
            let expected = params.store.name(id).to_string();
            let shape = params.store.value(id).shape();
            if nt.name != expected || nt.tensor.shape() != shape {
                return Err(Error::Config(format!(
                    "tensor '{}' with shape {:?} where '{expected}' with shape {shape:?} was expected",
                    nt.name,
                    nt.tensor.shape()
                )));
            }
            if !nt.tensor.is_finite() {
                return Err(Error::Config(format!(
                    "tensor '{expected}' has non-finite values"
                )));
            }
            *params.store.get_mut(id) = crate::nn::ParamTensor::new(nt.tensor);
        }
        Ok(params)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.to_file())
            .map_err(|e| Error::Config(format!("serializing model: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed model file: {e}")))?;
        Self::from_file(file)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        crate::io_util::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&crate::io_util::read_to_string(path)?)
    }
}

pub const MODEL_FORMAT: &str = "botnet-gnn-model";
pub const MODEL_VERSION: u32 = 1;

/// On-disk layout of a GNN model (JSON).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub config: GnnConfig,
    pub tensors: Vec<NamedTensor>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    #[serde(flatten)]
    pub tensor: Tensor2,
}

/// Logits of `params` on `g`, which must already carry a self-loop on every
/// node.
pub fn gnn_forward(params: &ModelParams, g: &Graph) -> Result<Tensor2> {
    if !g.has_self_loops() {
        return Err(Error::input(
            "graph must have a self-loop on every node before the forward pass",
        ));
    }
    params.logits(&g.normalize(params.config.norm))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    /// Probability of the botnet class per node.
    pub probs: Vec<f64>,
    pub labels: Vec<bool>,
}

impl Prediction {
    pub fn from_logits(logits: &Tensor2, threshold: f64) -> Self {
        let p = softmax(logits);
        let probs: Vec<f64> = (0..p.rows()).map(|r| p.get(r, 1)).collect();
        let labels = probs.iter().map(|&q| q >= threshold).collect();
        Prediction { probs, labels }
    }
}

/// Softmax bot probabilities and thresholded labels (`prob >= threshold`).
pub fn predict(params: &ModelParams, g: &Graph, threshold: f64) -> Result<Prediction> {
    Ok(Prediction::from_logits(&gnn_forward(params, g)?, threshold))
}
