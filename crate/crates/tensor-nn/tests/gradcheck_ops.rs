//! Every differentiable op must match central finite differences on random
//! shapes. The numeric oracle re-runs the forward pass through the same tape
//! API but never touches the analytic backward path.

use std::rc::Rc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use tensor_nn::gradcheck::{central_diff_grads, central_diff_grads_masked, max_rel_error_masked};
use tensor_nn::{Tape, Tensor, ValueId};

const H: f64 = 1e-5;
const MAX_REL_ERR: f64 = 1e-4;

fn random_tensor(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Tensor {
    let data = (0..rows * cols).map(|_| rng.random_range(-2.0..2.0)).collect();
    Tensor::from_vec(rows, cols, data)
}

/// Runs the scalar-valued builder forward and backward, then compares the
/// analytic input gradients against central differences.
fn check<F>(inputs: &[Tensor], mut build: F)
where
    F: FnMut(&mut Tape, &[ValueId]) -> ValueId,
{
    let mut tape = Tape::new();
    let ids: Vec<ValueId> = inputs.iter().map(|t| tape.leaf(t.clone())).collect();
    let out = build(&mut tape, &ids);
    tape.backward(out, 1.0);
    let analytic: Vec<Tensor> = ids
        .iter()
        .map(|&id| {
            tape.grad(id)
                .cloned()
                .unwrap_or_else(|| Tensor::zeros(tape.value(id).rows, tape.value(id).cols))
        })
        .collect();

    let (numeric, mask) = central_diff_grads_masked(
        &mut |xs: &[Tensor]| {
            let mut t = Tape::new();
            let ids: Vec<ValueId> = xs.iter().map(|x| t.leaf(x.clone())).collect();
            let out = build(&mut t, &ids);
            t.value(out).item()
        },
        inputs,
        H,
    );
    let (err, valid_fraction) = max_rel_error_masked(&analytic, &numeric, &mask);
    assert!(err < MAX_REL_ERR, "gradient mismatch: rel err {err}");
    assert!(
        valid_fraction > 0.8,
        "too many coordinates sat on kinks: {valid_fraction}"
    );
}

#[test]
fn dense_relu_l2_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let n = rng.random_range(1..4);
        let din = rng.random_range(1..5);
        let dout = rng.random_range(1..5);
        let inputs = vec![
            random_tensor(&mut rng, n, din),
            random_tensor(&mut rng, din, dout),
            random_tensor(&mut rng, 1, dout),
        ];
        check(&inputs, |t, ids| {
            let y = t.dense(ids[0], ids[1], ids[2]);
            let r = t.relu(y);
            let m = t.mean_rows(r);
            t.l2_norm(m)
        });
    }
}

#[test]
fn sigmoid_bce_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..10 {
        let label = f64::from(case % 2 == 0);
        let weight = rng.random_range(0.5..4.0);
        let inputs = vec![random_tensor(&mut rng, 1, 1)];
        check(&inputs, |t, ids| {
            let s = t.sigmoid(ids[0]);
            t.weighted_bce(s, label, weight)
        });
    }
}

#[test]
fn bce_gradient_matches_finite_differences_tightly() {
    // dL/dp itself to 1e-6, on the raw probability input.
    let p = Tensor::scalar(0.3);
    let mut tape = Tape::new();
    let id = tape.leaf(p.clone());
    let loss = tape.weighted_bce(id, 1.0, 2.0);
    tape.backward(loss, 1.0);
    let analytic = tape.grad(id).unwrap().item();
    let numeric = central_diff_grads(
        &mut |xs: &[Tensor]| {
            let mut t = Tape::new();
            let i = t.leaf(xs[0].clone());
            let l = t.weighted_bce(i, 1.0, 2.0);
            t.value(l).item()
        },
        &[p],
        1e-6,
    )[0]
    .item();
    assert!((analytic - numeric).abs() < 1e-6);
}

#[test]
fn concat_sub_scale_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..6 {
        let p = rng.random_range(1..4);
        let q = rng.random_range(1..4);
        let inputs = vec![
            random_tensor(&mut rng, 1, p),
            random_tensor(&mut rng, 1, q),
            random_tensor(&mut rng, 1, p + q),
        ];
        check(&inputs, |t, ids| {
            let cat = t.concat_cols(ids[0], ids[1]);
            let d = t.sub(cat, ids[2]);
            let s = t.scale(d, 0.5);
            t.l2_norm(s)
        });
    }
}

#[test]
fn bipartite_conv_full_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..6 {
        let nl = rng.random_range(1..4);
        let nr = rng.random_range(1..4);
        let din = rng.random_range(1..4);
        let dout = rng.random_range(1..4);
        let mut edges = Vec::new();
        for l in 0..nl {
            for r in 0..nr {
                if rng.random_bool(0.6) {
                    edges.push((l as u32, r as u32, rng.random_range(-1.5..1.5)));
                }
            }
        }
        let edges = Rc::new(edges);
        let inputs = vec![
            random_tensor(&mut rng, nl, din),
            random_tensor(&mut rng, nr, din),
            random_tensor(&mut rng, din, dout), // w_left_self
            random_tensor(&mut rng, din, dout), // w_left_neigh
            random_tensor(&mut rng, 1, dout),   // b_left
            random_tensor(&mut rng, din, dout), // w_right_self
            random_tensor(&mut rng, dout, dout), // w_right_neigh
            random_tensor(&mut rng, 1, dout),   // b_right
        ];
        let e = edges.clone();
        check(&inputs, move |t, ids| {
            let (nl_h, nr_h) = t.bipartite_conv(
                ids[0],
                ids[1],
                e.clone(),
                ids[2],
                ids[3],
                ids[4],
                ids[5],
                ids[6],
                ids[7],
            );
            let pl = t.mean_rows(nl_h);
            let pr = t.mean_rows(nr_h);
            let cat = t.concat_cols(pl, pr);
            t.l2_norm(cat)
        });
    }
}

#[test]
fn conv_permutation_equivariance() {
    // Permuting rows on one side permutes that side's output identically.
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let nl = 3;
    let nr = 4;
    let d = 3;
    let left = random_tensor(&mut rng, nl, d);
    let right = random_tensor(&mut rng, nr, d);
    let edges: Vec<(u32, u32, f64)> = vec![
        (0, 1, 0.7),
        (1, 3, -1.1),
        (2, 0, 0.4),
        (2, 2, 1.3),
    ];
    let params: Vec<Tensor> = vec![
        random_tensor(&mut rng, d, d),
        random_tensor(&mut rng, d, d),
        random_tensor(&mut rng, 1, d),
        random_tensor(&mut rng, d, d),
        random_tensor(&mut rng, d, d),
        random_tensor(&mut rng, 1, d),
    ];

    let run = |right_perm: &[usize]| -> (Tensor, Tensor) {
        // Permute the right side's rows and relabel edges accordingly.
        let mut right_p = Tensor::zeros(nr, d);
        for (old, &new) in right_perm.iter().enumerate() {
            for c in 0..d {
                right_p.data[new * d + c] = right.data[old * d + c];
            }
        }
        let edges_p: Vec<(u32, u32, f64)> = edges
            .iter()
            .map(|&(l, r, w)| (l, right_perm[r as usize] as u32, w))
            .collect();
        let mut tape = Tape::new();
        let l = tape.leaf(left.clone());
        let r = tape.leaf(right_p);
        let ids: Vec<ValueId> = params.iter().map(|p| tape.leaf(p.clone())).collect();
        let (ol, or) = tape.bipartite_conv(
            l,
            r,
            Rc::new(edges_p),
            ids[0],
            ids[1],
            ids[2],
            ids[3],
            ids[4],
            ids[5],
        );
        (tape.value(ol).clone(), tape.value(or).clone())
    };

    let identity: Vec<usize> = (0..nr).collect();
    let perm: Vec<usize> = vec![2, 0, 3, 1];
    let (l_id, r_id) = run(&identity);
    let (l_pm, r_pm) = run(&perm);
    for (a, b) in l_id.data.iter().zip(l_pm.data.iter()) {
        assert!((a - b).abs() < 1e-10, "left side must be unchanged");
    }
    for old in 0..nr {
        for c in 0..d {
            let a = r_id.data[old * d + c];
            let b = r_pm.data[perm[old] * d + c];
            assert!((a - b).abs() < 1e-10, "right rows must move with the permutation");
        }
    }
}

#[test]
fn training_smoke_loss_decreases() {
    // Fit sigmoid(w x + b) to four labeled points; the weighted batch loss
    // must decrease monotonically over 50 Adam steps at lr 1e-3.
    let data: Vec<(Vec<f64>, f64, f64)> = vec![
        (vec![1.0, 0.0], 0.0, 1.0),
        (vec![0.0, 1.0], 1.0, 2.0),
        (vec![1.0, 1.0], 1.0, 1.0),
        (vec![-1.0, 0.5], 0.0, 1.5),
    ];
    let mut params = vec![Tensor::from_vec(2, 1, vec![0.3, -0.2]), Tensor::zeros(1, 1)];
    let mut state = tensor_nn::AdamState::new(&params, 1e-3);
    let total_weight: f64 = data.iter().map(|(_, _, w)| w).sum();

    let mut losses = Vec::new();
    for _ in 0..50 {
        let mut grads = vec![Tensor::zeros(2, 1), Tensor::zeros(1, 1)];
        let mut total_loss = 0.0;
        for (x, label, weight) in &data {
            let mut tape = Tape::new();
            let w = tape.leaf(params[0].clone());
            let b = tape.leaf(params[1].clone());
            let xs = tape.leaf(Tensor::row(x));
            let z = tape.dense(xs, w, b);
            let p = tape.sigmoid(z);
            let loss = tape.weighted_bce(p, *label, *weight);
            total_loss += tape.value(loss).item();
            tape.backward(loss, 1.0 / total_weight);
            for (g, id) in grads.iter_mut().zip([w, b]) {
                for (a, &v) in g.data.iter_mut().zip(tape.grad(id).unwrap().data.iter()) {
                    *a += v;
                }
            }
        }
        losses.push(total_loss / total_weight);
        tensor_nn::adam_step(&mut params, &grads, &mut state).unwrap();
    }
    for w in losses.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "loss must not increase: {losses:?}");
    }
    assert!(losses.last().unwrap() < &losses[0]);
}
