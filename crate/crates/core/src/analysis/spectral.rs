//! Second-largest eigenvalue of the random-walk matrix `P = D⁻¹A`.
//!
//! `P` is similar to `N = D^{-1/2} A D^{-1/2}`, whose top eigenvector is
//! known in closed form (`∝ D^{1/2}·1`, eigenvalue 1). Power iteration runs
//! on the shifted operator `N + I` (spectrum in `[0, 2]`) with that vector
//! projected out every step, so it converges to the *signed* second-largest
//! eigenvalue even on bipartite graphs where `-1` is in the spectrum.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::seed::seeded_rng;
use crate::{Error, Graph, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lambda2Mode {
    /// Second-largest eigenvalue, with sign.
    Signed,
    /// Largest magnitude among all eigenvalues except the trivial 1.
    Absolute,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralOptions {
    /// Stop once successive Rayleigh quotients differ by less than this and
    /// the eigen-residual is below `0.1·√tol`.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub mode: Lambda2Mode,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: 1e-8,
            max_iters: 500_000,
            seed: 0x5eed,
            mode: Lambda2Mode::Signed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lambda2Report {
    pub value: f64,
    pub iterations: usize,
    /// Nodes in the component the eigenvalue was computed on.
    pub component_nodes: usize,
    /// The input was disconnected; only its largest component was used.
    pub largest_component_only: bool,
    pub bipartite: bool,
}

/// Symmetric walk operator on a connected graph.
struct WalkOperator<'a> {
    g: &'a Graph,
    inv_sqrt_deg: Vec<f64>,
    top: Vec<f64>,
}

impl<'a> WalkOperator<'a> {
    fn new(g: &'a Graph) -> Self {
        let sqrt_deg: Vec<f64> = (0..g.n()).map(|i| (g.degree(i) as f64).sqrt()).collect();
        let norm = sqrt_deg.iter().map(|x| x * x).sum::<f64>().sqrt();
        WalkOperator {
            g,
            inv_sqrt_deg: sqrt_deg.iter().map(|s| 1.0 / s).collect(),
            top: sqrt_deg.iter().map(|s| s / norm).collect(),
        }
    }

    /// `out = N x`
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let acc: f64 = self
                .g
                .neighbors(i)
                .iter()
                .map(|&j| x[j] * self.inv_sqrt_deg[j])
                .sum();
            *o = acc * self.inv_sqrt_deg[i];
        }
    }

    fn deflate(&self, x: &mut [f64]) {
        let c = dot(x, &self.top);
        for (xi, ti) in x.iter_mut().zip(&self.top) {
            *xi -= c * ti;
        }
    }

    /// Largest eigenvalue of `sign·N` restricted to the complement of the
    /// top eigenvector, returned in terms of `N` (i.e. times `sign`).
    fn extreme(&self, sign: f64, opts: &SpectralOptions) -> Result<(f64, usize)> {
        let n = self.g.n();
        let mut rng = seeded_rng(opts.seed);
        let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut nx = vec![0.0; n];
        self.deflate(&mut x);
        normalize(&mut x)?;

        let mut prev = f64::NAN;
        for iter in 1..=opts.max_iters {
            self.apply(&x, &mut nx);
            let rq = dot(&x, &nx);
            // residual of the current iterate, measured before the update
            let residual = x
                .iter()
                .zip(&nx)
                .map(|(xi, yi)| (yi - rq * xi).powi(2))
                .sum::<f64>()
                .sqrt();
            if (rq - prev).abs() < opts.tol && residual < 0.1 * opts.tol.sqrt() {
                return Ok((rq, iter));
            }
            prev = rq;
            // x ← (I + sign·N) x
            for (xi, yi) in x.iter_mut().zip(&nx) {
                *xi += sign * yi;
            }
            self.deflate(&mut x);
            normalize(&mut x)?;
        }
        Err(Error::Numerical(format!(
            "power iteration did not converge in {} iterations (last estimate {prev})",
            opts.max_iters
        )))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> Result<()> {
    let norm = dot(x, x).sqrt();
    if norm.is_nan() || norm <= 0.0 || !norm.is_finite() {
        return Err(Error::Numerical("power iterate collapsed to zero".into()));
    }
    x.iter_mut().for_each(|v| *v /= norm);
    Ok(())
}

/// Second eigenvalue of the walk matrix of `g` as given (no self-loops are
/// added). Disconnected inputs are reduced to their largest component.
pub fn lambda2(g: &Graph, opts: &SpectralOptions) -> Result<Lambda2Report> {
    let connected = g.is_connected();
    let owned;
    let h = if connected {
        g
    } else {
        owned = g.induced_subgraph(&g.largest_component())?;
        &owned
    };
    if h.n() < 2 {
        return Err(Error::input(format!(
            "second eigenvalue needs a component with at least 2 nodes, largest has {}",
            h.n()
        )));
    }
    let op = WalkOperator::new(h);
    let (signed, mut iterations) = op.extreme(1.0, opts)?;
    let value = match opts.mode {
        Lambda2Mode::Signed => signed,
        Lambda2Mode::Absolute => {
            let (lowest, it) = op.extreme(-1.0, opts)?;
            iterations += it;
            signed.abs().max(lowest.abs())
        }
    };
    Ok(Lambda2Report {
        value,
        iterations,
        component_nodes: h.n(),
        largest_component_only: !connected,
        bipartite: h.is_bipartite(),
    })
}
