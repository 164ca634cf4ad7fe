use thiserror::Error;

use crate::tensor::Tensor;

#[derive(Debug, Error)]
pub enum AdamError {
    #[error("non-finite gradient for parameter {index}; aborting training")]
    NonFiniteGradient { index: usize },
    #[error("parameter {index} shape {got:?} does not match state {expected:?}")]
    ShapeMismatch {
        index: usize,
        expected: (usize, usize),
        got: (usize, usize),
    },
}

/// Adam optimizer state: bias-corrected first and second moments per
/// parameter tensor.
#[derive(Clone, Debug)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<Tensor>,
    v: Vec<Tensor>,
}

impl AdamState {
    pub fn new(params: &[Tensor], lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: params.iter().map(|p| Tensor::zeros(p.rows, p.cols)).collect(),
            v: params.iter().map(|p| Tensor::zeros(p.rows, p.cols)).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(
    params: &mut [Tensor],
    grads: &[Tensor],
    state: &mut AdamState,
) -> Result<(), AdamError> {
    assert_eq!(params.len(), grads.len(), "one gradient per parameter");
    for (index, g) in grads.iter().enumerate() {
        if !g.is_finite() {
            return Err(AdamError::NonFiniteGradient { index });
        }
        if g.shape() != state.m[index].shape() {
            return Err(AdamError::ShapeMismatch {
                index,
                expected: state.m[index].shape(),
                got: g.shape(),
            });
        }
    }
    state.step += 1;
    let t = state.step as f64;
    let bc1 = 1.0 - state.beta1.powf(t);
    let bc2 = 1.0 - state.beta2.powf(t);
    for (index, (p, g)) in params.iter_mut().zip(grads.iter()).enumerate() {
        let m = &mut state.m[index];
        let v = &mut state.v[index];
        for ((pv, &gv), (mv, vv)) in p
            .data
            .iter_mut()
            .zip(g.data.iter())
            .zip(m.data.iter_mut().zip(v.data.iter_mut()))
        {
            *mv = state.beta1 * *mv + (1.0 - state.beta1) * gv;
            *vv = state.beta2 * *vv + (1.0 - state.beta2) * gv * gv;
            let m_hat = *mv / bc1;
            let v_hat = *vv / bc2;
            *pv -= state.lr * m_hat / (v_hat.sqrt() + state.eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut params = vec![Tensor::row(&[1.0, -2.0])];
        let grads = vec![Tensor::row(&[0.0, 0.0])];
        let mut state = AdamState::new(&params, 1e-3);
        adam_step(&mut params, &grads, &mut state).unwrap();
        assert_eq!(params[0].data, vec![1.0, -2.0]);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut params = vec![Tensor::scalar(0.0)];
        let grads = vec![Tensor::scalar(3.0)];
        let mut state = AdamState::new(&params, 1e-3);
        adam_step(&mut params, &grads, &mut state).unwrap();
        // Bias-corrected first step is -lr * sign(g) up to the eps term.
        assert!((params[0].item() + 1e-3).abs() < 1e-6);
    }

    #[test]
    fn nan_gradient_is_an_error() {
        let mut params = vec![Tensor::scalar(0.0)];
        let grads = vec![Tensor::scalar(f64::NAN)];
        let mut state = AdamState::new(&params, 1e-3);
        assert!(adam_step(&mut params, &grads, &mut state).is_err());
    }
}
