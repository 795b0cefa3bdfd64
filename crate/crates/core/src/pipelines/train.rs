use num_complex::Complex64;
use rand::Rng;

use super::scenario::{DetectorKind, ScenarioSpec, TrainConfig};
use super::slot::{compose_slot, SlotGeometry};
use crate::link::{draw_noise, noise_variance_for_es_n0_db, LinkConfig, ReceivedVector};
use crate::modem::{normalize_constellation, one_hot, qam_constellation, Constellation};
use crate::neuralnet::{
    adam_step, softmax_cross_entropy, AdamState, ForwardCache, Gradients, LossReport, Mlp,
};
use crate::rng::{domain, StreamRng, Streams};
use crate::turbulence::ChannelMatrix;
use crate::{Error, Result};

/// Trained receiver-side detector.
#[derive(Debug, Clone)]
pub struct ReceiverModel {
    pub rx: Mlp,
    pub report: LossReport,
}

/// Jointly trained transmitter and receiver.
#[derive(Debug, Clone)]
pub struct EndToEndModel {
    pub tx: Mlp,
    pub rx: Mlp,
    pub report: LossReport,
    pub constellation: Constellation,
}

/// Randomness of one training example, independent of the network weights.
struct Draw {
    symbols: Vec<usize>,
    channel: ChannelMatrix,
    noise: ReceivedVector,
}

fn draw_example(spec: &ScenarioSpec, cfg: &LinkConfig, rng: &mut StreamRng) -> Draw {
    let symbols = (0..spec.n_users)
        .map(|_| rng.random_range(0..spec.modulation_order))
        .collect();
    let channel = spec
        .fading
        .draw_channel(spec.n_users, spec.n_rx, spec.n_tx, rng);
    let noise = draw_noise(spec.n_rx, cfg.noise_variance, rng);
    Draw {
        symbols,
        channel,
        noise,
    }
}

fn check(spec: &ScenarioSpec, cfg: &TrainConfig, want: DetectorKind) -> Result<LinkConfig> {
    spec.validate()?;
    cfg.validate()?;
    if spec.detector != want {
        return Err(Error::ModelMismatch(format!(
            "training {want} requested for a scenario with detector {}",
            spec.detector
        )));
    }
    spec.link_config(noise_variance_for_es_n0_db(cfg.train_es_n0_db))
}

fn finish_iteration(report: &mut LossReport, iteration: usize, batch_losses: &[f64]) -> Result<()> {
    let mean = batch_losses.iter().sum::<f64>() / batch_losses.len() as f64;
    if !mean.is_finite() {
        return Err(Error::Divergence {
            iteration,
            loss: mean,
        });
    }
    report.losses.push(mean);
    Ok(())
}

/// Receiver-only DNN detector for a fixed QAM transmitter.
///
/// The network sees only the combined observation as two reals and is never
/// given channel gains.
pub fn train_receiver_dnn(spec: &ScenarioSpec, cfg: &TrainConfig) -> Result<ReceiverModel> {
    let link = check(spec, cfg, DetectorKind::QamDnn)?;
    let order = spec.modulation_order;
    let constellation = qam_constellation(order)?;
    let streams = Streams::new(cfg.seed);
    let mut rx = Mlp::new_he(
        &cfg.layer_dims(2, order),
        &mut streams.rng(&[domain::INIT_RX]),
    )?;
    let mut adam = AdamState::new(&rx);
    let mut rng = streams.rng(&[domain::TRAIN]);
    let mut report = LossReport::default();
    let k = cfg.batch_size;
    let inv_k = 1.0 / k as f64;

    for iteration in 0..cfg.iterations {
        let samples: Vec<(Complex64, usize)> = (0..k * cfg.samples_per_batch_ratio)
            .map(|_| {
                let d = draw_example(spec, &link, &mut rng);
                let out =
                    compose_slot(spec, &link, d.channel, &constellation, &d.symbols, &d.noise);
                (out.observation, d.symbols[out.target])
            })
            .collect();
        let mut batch_losses = Vec::with_capacity(cfg.samples_per_batch_ratio);
        for batch in samples.chunks(k) {
            let mut grads = Gradients::zeros_like(&rx);
            let mut loss = 0.0;
            for &(y, label) in batch {
                let (logits, cache) = rx.forward(&[y.re, y.im])?;
                let (l, mut d) = softmax_cross_entropy(&logits, &one_hot(label, order)?)?;
                loss += l;
                d.iter_mut().for_each(|v| *v *= inv_k);
                rx.backward_into(&cache, &d, &mut grads)?;
            }
            batch_losses.push(loss * inv_k);
            adam_step(&mut rx, &grads, &mut adam, cfg.learning_rate)?;
        }
        finish_iteration(&mut report, iteration, &batch_losses)?;
    }
    Ok(ReceiverModel { rx, report })
}

/// Transmitter outputs for every symbol, before normalization.
fn raw_points(tx: &Mlp) -> Result<(Vec<Complex64>, Vec<ForwardCache>)> {
    let m = tx.input_dim();
    let mut points = Vec::with_capacity(m);
    let mut caches = Vec::with_capacity(m);
    for s in 0..m {
        let (out, cache) = tx.forward(&one_hot(s, m)?.to_vec())?;
        points.push(Complex64::new(out[0], out[1]));
        caches.push(cache);
    }
    Ok((points, caches))
}

/// Constellation produced by a transmitter network.
pub fn learned_constellation(tx: &Mlp) -> Result<Constellation> {
    normalize_constellation(&raw_points(tx)?.0)
}

/// Gradient with respect to the raw points given the gradient with respect
/// to the unit-energy points `x = p / r`, `r = sqrt(mean |p|^2)`:
/// `∂L/∂p_j = (∂L/∂x_j - x_j Σ_k <∂L/∂x_k, x_k> / M) / r`.
pub fn normalize_backward(
    raw: &[Complex64],
    normalized: &[Complex64],
    grad_normalized: &[Complex64],
) -> Vec<Complex64> {
    let m = raw.len() as f64;
    let r = (raw.iter().map(|p| p.norm_sqr()).sum::<f64>() / m).sqrt();
    let proj: f64 = grad_normalized
        .iter()
        .zip(normalized)
        .map(|(g, x)| g.re * x.re + g.im * x.im)
        .sum();
    grad_normalized
        .iter()
        .zip(normalized)
        .map(|(g, x)| (g - x * (proj / m)) / r)
        .collect()
}

/// Jointly trained constellation-shaping transmitter and detector.
///
/// Per batch the transmitter maps every one-hot symbol to a point, the
/// points are renormalized to unit average energy, and each example passes
/// through a freshly drawn channel. The receiver loss is backpropagated
/// through the combined observation into each transmitting user's symbol
/// (`∂y/∂x_u` is that user's effective gain), then through the energy
/// normalization into the shared transmitter network.
pub fn train_end_to_end(spec: &ScenarioSpec, cfg: &TrainConfig) -> Result<EndToEndModel> {
    let link = check(spec, cfg, DetectorKind::EndToEndDnn)?;
    let order = spec.modulation_order;
    let streams = Streams::new(cfg.seed);
    let mut tx = Mlp::new_he(
        &cfg.layer_dims(order, 2),
        &mut streams.rng(&[domain::INIT_TX]),
    )?;
    let mut rx = Mlp::new_he(
        &cfg.layer_dims(2, order),
        &mut streams.rng(&[domain::INIT_RX]),
    )?;
    let mut tx_adam = AdamState::new(&tx);
    let mut rx_adam = AdamState::new(&rx);
    let mut rng = streams.rng(&[domain::TRAIN]);
    let mut report = LossReport::default();
    let k = cfg.batch_size;
    let inv_k = 1.0 / k as f64;

    for iteration in 0..cfg.iterations {
        let draws: Vec<Draw> = (0..k * cfg.samples_per_batch_ratio)
            .map(|_| draw_example(spec, &link, &mut rng))
            .collect();
        let mut batch_losses = Vec::with_capacity(cfg.samples_per_batch_ratio);
        for batch in draws.chunks(k) {
            let (raw, tx_caches) = raw_points(&tx)?;
            let constellation = normalize_constellation(&raw)?;
            let mut rx_grads = Gradients::zeros_like(&rx);
            let mut point_grads = vec![Complex64::new(0.0, 0.0); order];
            let mut loss = 0.0;
            for d in batch {
                let geometry = SlotGeometry::new(spec, &link, &d.channel);
                let out = compose_slot(
                    spec,
                    &link,
                    d.channel.clone(),
                    &constellation,
                    &d.symbols,
                    &d.noise,
                );
                let y = out.observation;
                let label = d.symbols[out.target];
                let (logits, cache) = rx.forward(&[y.re, y.im])?;
                let (l, mut dl) = softmax_cross_entropy(&logits, &one_hot(label, order)?)?;
                loss += l;
                dl.iter_mut().for_each(|v| *v *= inv_k);
                let d_in = rx.backward_into(&cache, &dl, &mut rx_grads)?;
                let d_obs = Complex64::new(d_in[0], d_in[1]);
                for &(u, coeff) in &geometry.coefficients {
                    point_grads[d.symbols[u]] += d_obs * coeff;
                }
            }
            batch_losses.push(loss * inv_k);

            let raw_grads = normalize_backward(&raw, constellation.points(), &point_grads);
            let mut tx_grads = Gradients::zeros_like(&tx);
            for (cache, g) in tx_caches.iter().zip(&raw_grads) {
                tx.backward_into(cache, &[g.re, g.im], &mut tx_grads)?;
            }
            adam_step(&mut rx, &rx_grads, &mut rx_adam, cfg.learning_rate)?;
            adam_step(&mut tx, &tx_grads, &mut tx_adam, cfg.learning_rate)?;
        }
        finish_iteration(&mut report, iteration, &batch_losses)?;
    }
    let constellation = learned_constellation(&tx)?;
    Ok(EndToEndModel {
        tx,
        rx,
        report,
        constellation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_backward_matches_finite_differences() {
        let raw = vec![
            Complex64::new(0.3, -1.2),
            Complex64::new(2.0, 0.4),
            Complex64::new(-0.7, 0.9),
            Complex64::new(0.1, 0.05),
        ];
        // scalar objective L = Σ <w_k, x_k> with fixed weights w
        let w = vec![
            Complex64::new(0.5, -0.25),
            Complex64::new(-1.0, 0.75),
            Complex64::new(0.2, 0.3),
            Complex64::new(-0.6, -0.1),
        ];
        let objective = |p: &[Complex64]| -> f64 {
            let x = normalize_constellation(p).unwrap();
            x.points()
                .iter()
                .zip(&w)
                .map(|(x, w)| x.re * w.re + x.im * w.im)
                .sum()
        };
        let normalized = normalize_constellation(&raw).unwrap();
        let analytic = normalize_backward(&raw, normalized.points(), &w);
        let h = 1e-6;
        for j in 0..raw.len() {
            for (part, unit) in [(0, Complex64::new(h, 0.0)), (1, Complex64::new(0.0, h))] {
                let mut up = raw.clone();
                up[j] += unit;
                let mut down = raw.clone();
                down[j] -= unit;
                let numeric = (objective(&up) - objective(&down)) / (2.0 * h);
                let a = if part == 0 {
                    analytic[j].re
                } else {
                    analytic[j].im
                };
                assert!(
                    (a - numeric).abs() < 1e-8,
                    "point {j} part {part}: {a} vs {numeric}"
                );
            }
        }
    }
}
