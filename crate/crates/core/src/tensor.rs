//! Dense row-major 64-bit matrices.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tensor2 {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Tensor2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 1.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Tensor2 {
            rows,
            cols,
            values: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::input(format!(
                "tensor of shape {rows}x{cols} needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        Ok(Tensor2 { rows, cols, values })
    }

    /// Builds a tensor from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Tensor2 {
            rows: rows.len(),
            cols,
            values: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.values[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn fill(&mut self, v: f64) {
        self.values.iter_mut().for_each(|x| *x = v);
    }

    /// Largest elementwise absolute difference; `None` if shapes differ.
    pub fn max_abs_diff(&self, other: &Tensor2) -> Option<f64> {
        if self.shape() != other.shape() {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn add_assign(&mut self, other: &Tensor2) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b;
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor2 {
        Tensor2 {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check_matmul(&self, rhs_rows: usize, what: &str) -> Result<()> {
        if self.cols != rhs_rows {
            return Err(Error::input(format!(
                "{what}: inner dimensions differ ({}x{} times {}x?)",
                self.rows, self.cols, rhs_rows
            )));
        }
        Ok(())
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &Tensor2) -> Result<Tensor2> {
        self.check_matmul(rhs.rows, "matmul")?;
        let mut out = Tensor2::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            let o = out.row_mut(i);
            for (k, &aik) in a.iter().enumerate() {
                if aik == 0.0 {
                    continue;
                }
                for (ov, &bv) in o.iter_mut().zip(rhs.row(k)) {
                    *ov += aik * bv;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · rhs`, used for weight gradients.
    pub fn t_matmul(&self, rhs: &Tensor2) -> Result<Tensor2> {
        if self.rows != rhs.rows {
            return Err(Error::input(format!(
                "t_matmul: row counts differ ({} vs {})",
                self.rows, rhs.rows
            )));
        }
        let mut out = Tensor2::zeros(self.cols, rhs.cols);
        for r in 0..self.rows {
            let a = self.row(r);
            let b = rhs.row(r);
            for (i, &ai) in a.iter().enumerate() {
                if ai == 0.0 {
                    continue;
                }
                for (ov, &bv) in out.row_mut(i).iter_mut().zip(b) {
                    *ov += ai * bv;
                }
            }
        }
        Ok(out)
    }

    /// `self · rhsᵀ`, used for input gradients.
    pub fn matmul_t(&self, rhs: &Tensor2) -> Result<Tensor2> {
        if self.cols != rhs.cols {
            return Err(Error::input(format!(
                "matmul_t: column counts differ ({} vs {})",
                self.cols, rhs.cols
            )));
        }
        let mut out = Tensor2::zeros(self.rows, rhs.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..rhs.rows {
                let dot: f64 = a.iter().zip(rhs.row(j)).map(|(x, y)| x * y).sum();
                out.values[i * rhs.rows + j] = dot;
            }
        }
        Ok(out)
    }

    /// Column sums as a `1 x cols` tensor.
    pub fn column_sums(&self) -> Tensor2 {
        let mut out = Tensor2::zeros(1, self.cols);
        for r in 0..self.rows {
            for (o, v) in out.values.iter_mut().zip(self.row(r)) {
                *o += v;
            }
        }
        out
    }

    /// Rows reordered so that row `perm[i]` of the result is row `i` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Tensor2 {
        let mut out = Tensor2::zeros(self.rows, self.cols);
        for (i, &p) in perm.iter().enumerate() {
            out.row_mut(p).copy_from_slice(self.row(i));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_agree() {
        let a = Tensor2::from_rows(&[&[1.0, 2.0, 0.0], &[-1.0, 0.5, 3.0]]);
        let b = Tensor2::from_rows(&[&[2.0, 1.0], &[0.0, -1.0], &[4.0, 0.25]]);
        let ab = a.matmul(&b).unwrap();
        assert_eq!(ab, Tensor2::from_rows(&[&[2.0, -1.0], &[10.0, -0.75]]));

        // aᵀ·c against explicit transpose
        let c = Tensor2::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let at = Tensor2::from_rows(&[&[1.0, -1.0], &[2.0, 0.5], &[0.0, 3.0]]);
        assert_eq!(a.t_matmul(&c).unwrap(), at.matmul(&c).unwrap());

        // bt is b transposed by hand, so a·btᵀ = a·b
        let bt = Tensor2::from_rows(&[&[2.0, 0.0, 4.0], &[1.0, -1.0, 0.25]]);
        assert_eq!(a.matmul_t(&bt).unwrap(), a.matmul(&b).unwrap());
    }

    #[test]
    fn shape_errors() {
        let a = Tensor2::zeros(2, 3);
        assert!(a.matmul(&Tensor2::zeros(2, 2)).is_err());
        assert!(Tensor2::from_vec(2, 2, vec![0.0; 3]).is_err());
    }
}
