use super::loss::softmax_cross_entropy;
use super::mlp::{Gradients, Mlp};
use crate::modem::OneHot;
use crate::Result;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

// gradients below this magnitude are compared absolutely
const RELATIVE_FLOOR: f64 = 1e-6;

fn loss_at(net: &Mlp, input: &[f64], target: &OneHot) -> Result<f64> {
    let logits = net.predict(input)?;
    softmax_cross_entropy(&logits, target).map(|(l, _)| l)
}

/// Worst relative discrepancy between backpropagated cross-entropy
/// gradients and central finite differences.
pub fn gradient_check(net: &Mlp, input: &[f64], target: &OneHot) -> Result<f64> {
    let (logits, cache) = net.forward(input)?;
    let (_, d_logits) = softmax_cross_entropy(&logits, target)?;
    let grads = net.backward(&cache, &d_logits)?;
    gradient_check_against(net, input, target, &grads)
}

/// As [`gradient_check`], but compares the supplied `analytic` gradients.
pub fn gradient_check_against(
    net: &Mlp,
    input: &[f64],
    target: &OneHot,
    analytic: &Gradients,
) -> Result<f64> {
    let mut probe = net.clone();
    let mut worst: f64 = 0.0;
    for (k, &a) in analytic.values().enumerate() {
        let orig = *probe.param_mut(k);
        *probe.param_mut(k) = orig + FD_STEP;
        let up = loss_at(&probe, input, target)?;
        *probe.param_mut(k) = orig - FD_STEP;
        let down = loss_at(&probe, input, target)?;
        *probe.param_mut(k) = orig;
        let numeric = (up - down) / (2.0 * FD_STEP);
        let scale = a.abs().max(numeric.abs()).max(RELATIVE_FLOOR);
        worst = worst.max((a - numeric).abs() / scale);
    }
    Ok(worst)
}
