use super::mlp::{Gradients, Mlp};
use crate::{Error, Result};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

/// First/second moment accumulators and step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    first: Gradients,
    second: Gradients,
    step: u64,
}

impl AdamState {
    pub fn new(net: &Mlp) -> Self {
        Self {
            first: Gradients::zeros_like(net),
            second: Gradients::zeros_like(net),
            step: 0,
        }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam update of every parameter.
pub fn adam_step(
    net: &mut Mlp,
    grads: &Gradients,
    state: &mut AdamState,
    learning_rate: f64,
) -> Result<()> {
    if !grads.shape_matches(net) || !state.first.shape_matches(net) {
        return Err(Error::Shape(
            "Adam state or gradients do not match the network".into(),
        ));
    }
    if !(learning_rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "learning rate must be positive (got {learning_rate})"
        )));
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - ADAM_BETA1.powi(t);
    let c2 = 1.0 - ADAM_BETA2.powi(t);
    let moments = state.first.values_mut().zip(state.second.values_mut());
    for ((p, g), (m, v)) in net.params_mut().zip(grads.values()).zip(moments) {
        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPSILON);
    }
    Ok(())
}
