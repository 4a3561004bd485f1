//! Dense tensors with reverse-mode gradients for the detector's fixed set of
//! ops, plus cross-entropy and Adam.

mod adam;
pub mod gradcheck;
mod loss;
mod param;
mod tape;

pub use adam::{adam_step, AdamConfig};
pub use gradcheck::{gradcheck, numeric_rel_err, GradcheckReport, REL_ERR_FLOOR};
pub use loss::{softmax, softmax_cross_entropy};
pub use param::{ParamId, ParamStore, ParamTensor};
pub use tape::{Tape, Var};
