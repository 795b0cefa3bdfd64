//! Minimal dense network engine: ReLU hidden layers with a linear output
//! layer, softmax cross-entropy, exact backpropagation, Adam, finite
//! difference gradient checking and a line-oriented parameter format.

mod adam;
mod gradcheck;
mod io;
mod loss;
mod mlp;

pub use adam::{adam_step, AdamState, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON};
pub use gradcheck::{gradient_check, gradient_check_against, FD_STEP};
pub use io::{load_params, read_params, save_params, write_params, FORMAT_TAG};
pub use loss::softmax_cross_entropy;
pub use mlp::{ForwardCache, Gradients, Mlp};

/// Per-iteration mean batch loss.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossReport {
    pub losses: Vec<f64>,
}

impl LossReport {
    pub fn last(&self) -> Option<f64> {
        self.losses.last().copied()
    }

    /// Mean of the final `n` entries.
    pub fn tail_mean(&self, n: usize) -> Option<f64> {
        if self.losses.is_empty() {
            return None;
        }
        let n = n.clamp(1, self.losses.len());
        let tail = &self.losses[self.losses.len() - n..];
        Some(tail.iter().sum::<f64>() / n as f64)
    }
}
