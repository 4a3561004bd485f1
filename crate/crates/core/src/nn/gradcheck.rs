//! Central finite-difference gradient checking.

use rand::seq::index;

use super::{ParamId, ParamStore};
use crate::seed::seeded_rng;
use crate::{Error, Result, Tensor2};

/// Denominator floor for the relative error. Central differences at
/// `ε = 1e-6` on O(1) losses carry roughly 1e-10 of roundoff, so
/// coordinates whose true gradient is far below this floor are compared
/// on an absolute rather than relative scale.
pub const REL_ERR_FLOOR: f64 = 1e-4;

/// `|a − b| / max(|a|, |b|, REL_ERR_FLOOR)`.
pub fn numeric_rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_ERR_FLOOR)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradcheckReport {
    pub max_rel_err: f64,
    pub coords_checked: usize,
    /// Parameter and flat index of the worst coordinate.
    pub worst: Option<(usize, usize)>,
}

/// Compares `analytic` (one tensor per parameter, in store order) against
/// central differences of `loss` on up to `sample` coordinates chosen
/// uniformly without replacement. Parameter values are restored afterwards.
pub fn gradcheck<F>(
    params: &mut ParamStore,
    analytic: &[Tensor2],
    mut loss: F,
    eps: f64,
    sample: usize,
    seed: u64,
) -> Result<GradcheckReport>
where
    F: FnMut(&ParamStore) -> Result<f64>,
{
    if analytic.len() != params.len() {
        return Err(Error::input(format!(
            "{} analytic gradients for {} parameters",
            analytic.len(),
            params.len()
        )));
    }
    let mut coords = Vec::new();
    for (id, g) in params.ids().zip(analytic) {
        if g.shape() != params.value(id).shape() {
            return Err(Error::input(format!(
                "gradient shape {:?} for parameter '{}' of shape {:?}",
                g.shape(),
                params.name(id),
                params.value(id).shape()
            )));
        }
        coords.extend((0..g.values().len()).map(|k| (id, k)));
    }
    let chosen: Vec<(ParamId, usize)> = if sample >= coords.len() {
        coords
    } else {
        let mut rng = seeded_rng(seed);
        let mut picks = index::sample(&mut rng, coords.len(), sample).into_vec();
        picks.sort_unstable();
        picks.into_iter().map(|i| coords[i]).collect()
    };

    let mut report = GradcheckReport {
        max_rel_err: 0.0,
        coords_checked: chosen.len(),
        worst: None,
    };
    for (id, k) in chosen {
        let original = params.value(id).values()[k];
        params.get_mut(id).value.values_mut()[k] = original + eps;
        let plus = loss(params);
        params.get_mut(id).value.values_mut()[k] = original - eps;
        let minus = loss(params);
        params.get_mut(id).value.values_mut()[k] = original;
        let numeric = (plus? - minus?) / (2.0 * eps);
        let err = numeric_rel_err(analytic[id.index()].values()[k], numeric);
        // NaN counts as worst
        if err.is_nan() || err > report.max_rel_err {
            report.max_rel_err = err;
            report.worst = Some((id.index(), k));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_store() -> (ParamStore, ParamId) {
        let mut ps = ParamStore::new();
        let id = ps.add(
            "w",
            Tensor2::from_vec(
                1,
                300,
                (0..300)
                    .map(|i| if i % 2 == 0 { 0.01 } else { -0.01 })
                    .collect(),
            )
            .unwrap(),
        );
        (ps, id)
    }

    fn coef(i: usize) -> f64 {
        1.0 + (i % 7) as f64 * 0.1
    }

    // loss = Σ c_i w_i + ½ Σ w_i², gradient c + w
    fn loss(ps: &ParamStore, id: ParamId) -> f64 {
        ps.value(id)
            .values()
            .iter()
            .enumerate()
            .map(|(i, w)| coef(i) * w + 0.5 * w * w)
            .sum()
    }

    fn analytic(ps: &ParamStore, id: ParamId) -> Vec<Tensor2> {
        let v = ps
            .value(id)
            .values()
            .iter()
            .enumerate()
            .map(|(i, w)| coef(i) + w);
        vec![Tensor2::from_vec(1, 300, v.collect()).unwrap()]
    }

    #[test]
    fn exact_on_quadratics() {
        let (mut ps, id) = quadratic_store();
        let g = analytic(&ps, id);
        let before = ps.clone();
        let r = gradcheck(&mut ps, &g, |p| Ok(loss(p, id)), 1e-6, 250, 1).unwrap();
        assert_eq!(r.coords_checked, 250);
        assert!(r.max_rel_err < 1e-9, "{r:?}");
        assert_eq!(ps, before);
    }

    #[test]
    fn detects_corruption() {
        let (mut ps, id) = quadratic_store();
        let mut g = analytic(&ps, id);
        g[0].values_mut()[17] += 0.5;
        let r = gradcheck(&mut ps, &g, |p| Ok(loss(p, id)), 1e-6, usize::MAX, 1).unwrap();
        assert!(r.max_rel_err > 1e-2);
        assert_eq!(r.worst, Some((0, 17)));
    }

    #[test]
    fn shape_mismatch() {
        let (mut ps, id) = quadratic_store();
        let g = vec![Tensor2::zeros(2, 2)];
        assert!(gradcheck(&mut ps, &g, |p| Ok(loss(p, id)), 1e-6, 10, 0).is_err());
    }
}
