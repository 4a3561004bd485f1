//! A recording of the forward pass. Each op stores just enough to run its
//! adjoint; [`Tape::backward`] replays them in reverse and accumulates
//! parameter gradients into the [`ParamStore`].

use super::{ParamId, ParamStore};
use crate::{Error, NormalizedAdjacency, Result, Tensor2};

/// Handle to a value recorded on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(usize);

enum Op<'a> {
    Leaf,
    Affine {
        x: Var,
        w: ParamId,
        bias: Option<ParamId>,
    },
    Aggregate {
        adj: &'a NormalizedAdjacency,
        x: Var,
    },
    Relu {
        x: Var,
    },
    Add {
        a: Var,
        b: Var,
    },
}

#[derive(Default)]
pub struct Tape<'a> {
    values: Vec<Tensor2>,
    ops: Vec<Op<'a>>,
}

impl<'a> Tape<'a> {
    pub fn new() -> Self {
        Tape {
            values: Vec::new(),
            ops: Vec::new(),
        }
    }

    fn push(&mut self, value: Tensor2, op: Op<'a>) -> Var {
        self.values.push(value);
        self.ops.push(op);
        Var(self.values.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Tensor2 {
        &self.values[v.0]
    }

    /// Consumes the tape, keeping only `v`.
    pub fn into_value(mut self, v: Var) -> Tensor2 {
        self.values.swap_remove(v.0)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Constant input; no gradient flows into it.
    pub fn leaf(&mut self, value: Tensor2) -> Var {
        self.push(value, Op::Leaf)
    }

    /// `x W + bias`, bias broadcast over rows.
    pub fn affine(
        &mut self,
        params: &ParamStore,
        x: Var,
        w: ParamId,
        bias: Option<ParamId>,
    ) -> Result<Var> {
        let wv = params.value(w);
        let mut out = self.values[x.0].matmul(wv)?;
        if let Some(b) = bias {
            let bv = params.value(b);
            if bv.shape() != (1, wv.cols()) {
                return Err(Error::input(format!(
                    "bias shape {:?} does not match output width {}",
                    bv.shape(),
                    wv.cols()
                )));
            }
            for r in 0..out.rows() {
                for (o, &bb) in out.row_mut(r).iter_mut().zip(bv.values()) {
                    *o += bb;
                }
            }
        }
        Ok(self.push(out, Op::Affine { x, w, bias }))
    }

    /// `Ā x`.
    pub fn aggregate(&mut self, adj: &'a NormalizedAdjacency, x: Var) -> Result<Var> {
        let out = adj.spmm(&self.values[x.0])?;
        Ok(self.push(out, Op::Aggregate { adj, x }))
    }

    pub fn relu(&mut self, x: Var) -> Var {
        let out = self.values[x.0].map(|v| v.max(0.0));
        self.push(out, Op::Relu { x })
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (va, vb) = (&self.values[a.0], &self.values[b.0]);
        if va.shape() != vb.shape() {
            return Err(Error::input(format!(
                "add: shapes {:?} and {:?} differ",
                va.shape(),
                vb.shape()
            )));
        }
        let mut out = va.clone();
        out.add_assign(vb);
        Ok(self.push(out, Op::Add { a, b }))
    }

    /// Backpropagates `seed = ∂loss/∂out` and adds the parameter gradients
    /// into `params`.
    pub fn backward(&self, out: Var, seed: Tensor2, params: &mut ParamStore) -> Result<()> {
        if seed.shape() != self.values[out.0].shape() {
            return Err(Error::input(format!(
                "gradient seed shape {:?} does not match output {:?}",
                seed.shape(),
                self.values[out.0].shape()
            )));
        }
        let mut grads: Vec<Option<Tensor2>> = vec![None; out.0 + 1];
        grads[out.0] = Some(seed);

        for i in (0..=out.0).rev() {
            let Some(g) = grads[i].take() else { continue };
            match self.ops[i] {
                Op::Leaf => {}
                Op::Affine { x, w, bias } => {
                    let xv = &self.values[x.0];
                    params.get_mut(w).grad.add_assign(&xv.t_matmul(&g)?);
                    if let Some(b) = bias {
                        params.get_mut(b).grad.add_assign(&g.column_sums());
                    }
                    if self.needs_grad(x) {
                        let dx = g.matmul_t(params.value(w))?;
                        accumulate(&mut grads[x.0], dx);
                    }
                }
                Op::Aggregate { adj, x } => {
                    if self.needs_grad(x) {
                        accumulate(&mut grads[x.0], adj.spmm_transpose(&g)?);
                    }
                }
                Op::Relu { x } => {
                    let y = &self.values[i];
                    let mut dx = g;
                    for (d, &yv) in dx.values_mut().iter_mut().zip(y.values()) {
                        if yv <= 0.0 {
                            *d = 0.0;
                        }
                    }
                    accumulate(&mut grads[x.0], dx);
                }
                Op::Add { a, b } => {
                    accumulate(&mut grads[b.0], g.clone());
                    accumulate(&mut grads[a.0], g);
                }
            }
        }
        Ok(())
    }

    fn needs_grad(&self, v: Var) -> bool {
        !matches!(self.ops[v.0], Op::Leaf)
    }
}

fn accumulate(slot: &mut Option<Tensor2>, g: Tensor2) {
    match slot {
        Some(existing) => existing.add_assign(&g),
        None => *slot = Some(g),
    }
}
