mod common;

use botnet_gnn::nn::{gradcheck, ParamStore, Tape};
use botnet_gnn::{NormMode, Tensor2};
use common::{random_connected, rng};
use rand::RngExt;

fn random_tensor(rows: usize, cols: usize, seed: u64) -> Tensor2 {
    let mut r = rng(seed);
    Tensor2::from_vec(
        rows,
        cols,
        (0..rows * cols)
            .map(|_| r.random_range(-1.0..1.0))
            .collect(),
    )
    .unwrap()
}

#[test]
fn aggregate_gradient_on_six_node_graph() {
    let g = random_connected(6, 4, 3).add_self_loops();
    for mode in NormMode::ALL {
        let adj = g.normalize(mode);
        let x = random_tensor(6, 3, 10);
        let mut ps = ParamStore::new();
        let w = ps.add("w", random_tensor(3, 3, 11));
        let c = random_tensor(6, 3, 12);
        // loss = Σ c ⊙ Ā(xW)
        let loss = |p: &ParamStore| {
            let mut t = Tape::new();
            let xv = t.leaf(x.clone());
            let h = t.affine(p, xv, w, None)?;
            let y = t.aggregate(&adj, h)?;
            Ok(t.value(y)
                .values()
                .iter()
                .zip(c.values())
                .map(|(a, b)| a * b)
                .sum::<f64>())
        };
        let mut t = Tape::new();
        let xv = t.leaf(x.clone());
        let h = t.affine(&ps, xv, w, None).unwrap();
        let y = t.aggregate(&adj, h).unwrap();
        t.backward(y, c.clone(), &mut ps).unwrap();
        let analytic = ps.grads();
        let report = gradcheck(&mut ps, &analytic, loss, 1e-6, usize::MAX, 0).unwrap();
        assert!(report.max_rel_err < 1e-6, "{mode}: {report:?}");
    }
}

#[test]
fn relu_gradient_away_from_kinks() {
    // relu(I·X) with X the parameter, entries kept at least 1e-3 from zero
    let mut x = random_tensor(8, 5, 20);
    x.values_mut()
        .iter_mut()
        .filter(|v| v.abs() < 1e-3)
        .for_each(|v| *v = 0.5);
    let mut ps = ParamStore::new();
    let xp = ps.add("x", x);
    let eye = Tensor2::from_vec(
        8,
        8,
        (0..64)
            .map(|k| if k % 9 == 0 { 1.0 } else { 0.0 })
            .collect(),
    )
    .unwrap();
    let c = random_tensor(8, 5, 21);
    let run = |p: &ParamStore, t: &mut Tape| {
        let e = t.leaf(eye.clone());
        let pre = t.affine(p, e, xp, None)?;
        Ok::<_, botnet_gnn::Error>(t.relu(pre))
    };
    let mut t = Tape::new();
    let y = run(&ps, &mut t).unwrap();
    t.backward(y, c.clone(), &mut ps).unwrap();
    let analytic = ps.grads();
    let report = gradcheck(
        &mut ps,
        &analytic,
        |p| {
            let mut t = Tape::new();
            let y = run(p, &mut t)?;
            Ok(t.value(y)
                .values()
                .iter()
                .zip(c.values())
                .map(|(u, v)| u * v)
                .sum())
        },
        1e-6,
        usize::MAX,
        0,
    )
    .unwrap();
    assert!(report.max_rel_err < 1e-6, "{report:?}");
}

#[test]
fn add_gradient_reaches_both_branches() {
    let mut ps = ParamStore::new();
    let a = ps.add("a", random_tensor(2, 3, 30));
    let b = ps.add("b", random_tensor(2, 3, 31));
    let x = random_tensor(4, 2, 32);
    let c = random_tensor(4, 3, 33);
    let run = |p: &ParamStore, t: &mut Tape| {
        let xv = t.leaf(x.clone());
        let ya = t.affine(p, xv, a, None)?;
        let yb = t.affine(p, xv, b, None)?;
        t.add(ya, yb)
    };
    let mut t = Tape::new();
    let y = run(&ps, &mut t).unwrap();
    t.backward(y, c.clone(), &mut ps).unwrap();
    assert_eq!(ps.get(a).grad, ps.get(b).grad);
    let analytic = ps.grads();
    let report = gradcheck(
        &mut ps,
        &analytic,
        |p| {
            let mut t = Tape::new();
            let y = run(p, &mut t)?;
            Ok(t.value(y)
                .values()
                .iter()
                .zip(c.values())
                .map(|(u, v)| u * v)
                .sum())
        },
        1e-6,
        usize::MAX,
        0,
    )
    .unwrap();
    assert!(report.max_rel_err < 1e-6, "{report:?}");
}

#[test]
fn large_inputs_stay_finite() {
    let g = random_connected(20, 30, 5).add_self_loops();
    let adj = g.normalize(NormMode::SourceDegree);
    let mut ps = ParamStore::new();
    let w = ps.add("w", Tensor2::filled(3, 3, 1e-3));
    let x = Tensor2::filled(20, 3, 1e6);
    let mut t = Tape::new();
    let xv = t.leaf(x);
    let h = t.affine(&ps, xv, w, None).unwrap();
    let a = t.aggregate(&adj, h).unwrap();
    let y = t.relu(a);
    assert!(t.value(y).is_finite());
    t.backward(y, Tensor2::ones(20, 3), &mut ps).unwrap();
    assert!(ps.get(w).grad.is_finite());
}
