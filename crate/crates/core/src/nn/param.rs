use crate::Tensor2;

/// Index of a parameter inside a [`ParamStore`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParamId(pub(crate) usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A trainable tensor with its gradient accumulator and Adam moments.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamTensor {
    pub value: Tensor2,
    pub grad: Tensor2,
    pub first_moment: Tensor2,
    pub second_moment: Tensor2,
    pub step: u64,
}

impl ParamTensor {
    pub fn new(value: Tensor2) -> Self {
        let (r, c) = value.shape();
        ParamTensor {
            value,
            grad: Tensor2::zeros(r, c),
            first_moment: Tensor2::zeros(r, c),
            second_moment: Tensor2::zeros(r, c),
            step: 0,
        }
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }
}

/// Named, ordered collection of parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamStore {
    params: Vec<ParamTensor>,
    names: Vec<String>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor2) -> ParamId {
        self.params.push(ParamTensor::new(value));
        self.names.push(name.into());
        ParamId(self.params.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn get(&self, id: ParamId) -> &ParamTensor {
        &self.params[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut ParamTensor {
        &mut self.params[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Tensor2 {
        &self.params[id.0].value
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.params.len()).map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamTensor)> {
        self.names.iter().map(String::as_str).zip(&self.params)
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut ParamTensor> {
        self.params.iter_mut()
    }

    pub fn zero_grad(&mut self) {
        self.params.iter_mut().for_each(ParamTensor::zero_grad);
    }

    /// Total scalar count.
    pub fn numel(&self) -> usize {
        self.params.iter().map(|p| p.value.values().len()).sum()
    }

    /// Snapshot of every gradient, in parameter order.
    pub fn grads(&self) -> Vec<Tensor2> {
        self.params.iter().map(|p| p.grad.clone()).collect()
    }
}
