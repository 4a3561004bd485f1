use crate::{Error, Result, Tensor2};

/// Row-wise softmax, stabilized by subtracting each row's max.
pub fn softmax(logits: &Tensor2) -> Tensor2 {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        row.iter_mut().for_each(|v| *v /= total);
    }
    out
}

/// Mean over nodes of `w[y]·(−log softmax(logits)[y])`, with its gradient
/// with respect to the logits.
pub fn softmax_cross_entropy(
    logits: &Tensor2,
    labels: &[bool],
    class_weights: [f64; 2],
) -> Result<(f64, Tensor2)> {
    if logits.cols() != 2 {
        return Err(Error::input(format!(
            "expected 2 logit columns, got {}",
            logits.cols()
        )));
    }
    if labels.len() != logits.rows() {
        return Err(Error::input(format!(
            "{} labels for {} logit rows",
            labels.len(),
            logits.rows()
        )));
    }
    let n = logits.rows();
    if n == 0 {
        return Ok((0.0, Tensor2::zeros(0, 2)));
    }
    let scale = 1.0 / n as f64;
    let mut grad = Tensor2::zeros(n, 2);
    let mut loss = 0.0;
    for (r, &label) in labels.iter().enumerate() {
        let row = logits.row(r);
        let y = label as usize;
        let w = class_weights[y];
        let max = row[0].max(row[1]);
        let e0 = (row[0] - max).exp();
        let e1 = (row[1] - max).exp();
        let log_z = (e0 + e1).ln() + max;
        loss += w * (log_z - row[y]);
        let p = [e0 / (e0 + e1), e1 / (e0 + e1)];
        let g = grad.row_mut(r);
        for c in 0..2 {
            let target = if c == y { 1.0 } else { 0.0 };
            g[c] = w * (p[c] - target) * scale;
        }
    }
    Ok((loss * scale, grad))
}
