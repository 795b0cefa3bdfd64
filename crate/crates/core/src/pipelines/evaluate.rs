use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::scenario::{DetectorKind, ScenarioSpec};
use super::slot::simulate_slot;
use super::train::learned_constellation;
use crate::link::{blind_gain_estimate, ml_detect, noise_variance_for_es_n0_db};
use crate::modem::{argmax, qam_constellation, Constellation};
use crate::neuralnet::Mlp;
use crate::rng::{domain, Streams, TrialStreams};
use crate::stats::{wilson_interval, Z_95};
use crate::{Error, Result};

/// Trials handed to one rayon task.
const CHUNK: u64 = 2048;

/// Detector under test together with any trained parameters it needs.
#[derive(Debug, Clone, Copy)]
pub enum Detector<'a> {
    QamMlPerfect,
    QamMlBlind,
    QamDnn { rx: &'a Mlp },
    EndToEnd { tx: &'a Mlp, rx: &'a Mlp },
}

impl Detector<'_> {
    pub fn kind(&self) -> DetectorKind {
        match self {
            Detector::QamMlPerfect => DetectorKind::QamMlPerfect,
            Detector::QamMlBlind => DetectorKind::QamMlBlind,
            Detector::QamDnn { .. } => DetectorKind::QamDnn,
            Detector::EndToEnd { .. } => DetectorKind::EndToEndDnn,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerPoint {
    pub es_n0_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub ser: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SerPoint {
    pub fn new(es_n0_db: f64, trials: u64, errors: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(errors, trials, Z_95);
        Self {
            es_n0_db,
            trials,
            errors,
            ser: errors as f64 / trials as f64,
            ci_low,
            ci_high,
        }
    }

    /// True when this point's interval lies entirely below `other`'s.
    pub fn clearly_below(&self, other: &SerPoint) -> bool {
        self.ci_high < other.ci_low
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SerCurve {
    pub points: Vec<SerPoint>,
}

impl SerCurve {
    /// Es/N0 at which the curve crosses `target` SER, interpolating
    /// `log10(SER)` linearly between grid points.
    pub fn es_n0_at_ser(&self, target: f64) -> Option<f64> {
        let lt = target.log10();
        self.points.windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            if a.ser >= target && b.ser <= target && a.ser > 0.0 {
                if b.ser == 0.0 {
                    return Some(b.es_n0_db);
                }
                let (la, lb) = (a.ser.log10(), b.ser.log10());
                if la == lb {
                    return Some(a.es_n0_db);
                }
                Some(a.es_n0_db + (lt - la) / (lb - la) * (b.es_n0_db - a.es_n0_db))
            } else {
                None
            }
        })
    }
}

enum Decide<'a> {
    Perfect,
    Blind,
    Network(&'a Mlp),
}

fn check_network(net: &Mlp, input: usize, output: usize, what: &str) -> Result<()> {
    if net.input_dim() != input || net.output_dim() != output {
        return Err(Error::ModelMismatch(format!(
            "{what} network has dims {:?}, expected {input} inputs and {output} outputs",
            net.dims()
        )));
    }
    Ok(())
}

/// Monte Carlo symbol-error rate of the target user over an Es/N0 grid.
///
/// Trial `t` at grid index `g` draws all of its randomness from the
/// sub-stream `(seed, g, t)`, and per-chunk error counts are summed as
/// integers, so the curve does not depend on the rayon thread count.
pub fn evaluate_ser(
    spec: &ScenarioSpec,
    detector: Detector<'_>,
    grid_db: &[f64],
    trials: u64,
    seed: u64,
) -> Result<SerCurve> {
    spec.validate()?;
    if detector.kind() != spec.detector {
        return Err(Error::ModelMismatch(format!(
            "scenario expects detector {}, got {}",
            spec.detector,
            detector.kind()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let order = spec.modulation_order;
    let (constellation, decide): (Constellation, Decide) = match detector {
        Detector::QamMlPerfect => (qam_constellation(order)?, Decide::Perfect),
        Detector::QamMlBlind => (qam_constellation(order)?, Decide::Blind),
        Detector::QamDnn { rx } => {
            check_network(rx, 2, order, "receiver")?;
            (qam_constellation(order)?, Decide::Network(rx))
        }
        Detector::EndToEnd { tx, rx } => {
            check_network(tx, order, 2, "transmitter")?;
            check_network(rx, 2, order, "receiver")?;
            (learned_constellation(tx)?, Decide::Network(rx))
        }
    };

    let streams = Streams::new(seed);
    let mut points = Vec::with_capacity(grid_db.len());
    for (g, &db) in grid_db.iter().enumerate() {
        let noise_variance = noise_variance_for_es_n0_db(db);
        let link = spec.link_config(noise_variance)?;
        let combined_noise = spec.combiner.combined_noise_variance(&link);
        let trial_streams = TrialStreams::new(&streams, &[domain::EVAL, g as u64]);
        let n_chunks = trials.div_ceil(CHUNK);
        let errors: u64 = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let mut errors = 0u64;
                let mut symbols = vec![0usize; spec.n_users];
                let mut block = Vec::with_capacity(spec.blind_block_len);
                for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    let mut rng = trial_streams.trial(t);
                    symbols
                        .iter_mut()
                        .for_each(|s| *s = rng.random_range(0..order));
                    let out = simulate_slot(spec, &link, &constellation, &symbols, &mut rng);
                    let label = symbols[out.target];
                    let detected = match decide {
                        Decide::Perfect => {
                            ml_detect(out.observation, out.target_gain, &constellation)
                        }
                        Decide::Blind => {
                            block.clear();
                            block.push(out.observation);
                            for _ in 1..spec.blind_block_len {
                                symbols
                                    .iter_mut()
                                    .for_each(|s| *s = rng.random_range(0..order));
                                block.push(out.geometry.observe(
                                    constellation.points(),
                                    &symbols,
                                    spec.n_rx,
                                    noise_variance,
                                    &mut rng,
                                ));
                            }
                            let g = blind_gain_estimate(&block, combined_noise)
                                .expect("block length validated");
                            ml_detect(out.observation, g, &constellation)
                        }
                        Decide::Network(rx) => {
                            let y: Complex64 = out.observation;
                            argmax(&rx.predict(&[y.re, y.im]).expect("dims checked"))
                        }
                    };
                    if detected != label {
                        errors += 1;
                    }
                }
                errors
            })
            .sum();
        points.push(SerPoint::new(db, trials, errors));
    }
    Ok(SerCurve { points })
}
