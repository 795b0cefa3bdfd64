use crate::modem::OneHot;
use crate::{Error, Result};

/// `-log softmax(logits)[hot]` and its gradient `softmax(logits) - target`.
pub fn softmax_cross_entropy(logits: &[f64], target: &OneHot) -> Result<(f64, Vec<f64>)> {
    if logits.len() != target.len() {
        return Err(Error::Dimension {
            expected: target.len(),
            got: logits.len(),
        });
    }
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = probs.iter().sum();
    let log_sum = sum.ln() + max;
    probs.iter_mut().for_each(|p| *p /= sum);
    // rounding can leave a tiny negative value; NaN must survive
    let raw = log_sum - logits[target.hot_index()];
    let loss = if raw < 0.0 { 0.0 } else { raw };
    probs[target.hot_index()] -= 1.0;
    Ok((loss, probs))
}
