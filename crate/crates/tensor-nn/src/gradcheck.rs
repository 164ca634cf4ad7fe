//! Central finite-difference gradient checking, used by the test suites as
//! the independent oracle for every differentiable op.
//!
//! Central differences are only valid where the function is differentiable.
//! A probe interval straddling a ReLU kink produces a discrepancy of up to
//! half the slope jump regardless of the step size, which says nothing
//! about the backward pass (the analytic side correctly applies the chosen
//! subgradient). Checks therefore sample configurations and reject any
//! whose forward pass runs close to a kink — see
//! [`crate::Tape::min_kink_distance`].

use crate::tensor::Tensor;

/// Numerical gradient of `f` at `inputs` by central differences with step
/// `h`, one tensor of partials per input.
pub fn central_diff_grads(
    f: &mut dyn FnMut(&[Tensor]) -> f64,
    inputs: &[Tensor],
    h: f64,
) -> Vec<Tensor> {
    let mut grads = Vec::with_capacity(inputs.len());
    let mut work: Vec<Tensor> = inputs.to_vec();
    for i in 0..inputs.len() {
        let mut g = Tensor::zeros(inputs[i].rows, inputs[i].cols);
        for k in 0..inputs[i].numel() {
            let orig = work[i].data[k];
            work[i].data[k] = orig + h;
            let up = f(&work);
            work[i].data[k] = orig - h;
            let down = f(&work);
            work[i].data[k] = orig;
            g.data[k] = (up - down) / (2.0 * h);
        }
        grads.push(g);
    }
    grads
}

/// Largest relative elementwise discrepancy between two gradient sets:
/// `|a - b| / max(1, |a|, |b|)`.
pub fn max_rel_error(analytic: &[Tensor], numeric: &[Tensor]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    let mut worst: f64 = 0.0;
    for (a, n) in analytic.iter().zip(numeric.iter()) {
        assert_eq!(a.shape(), n.shape());
        for (&av, &nv) in a.data.iter().zip(n.data.iter()) {
            let denom = 1.0f64.max(av.abs()).max(nv.abs());
            worst = worst.max((av - nv).abs() / denom);
        }
    }
    worst
}
