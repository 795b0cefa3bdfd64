//! The four harness commands. Each writes its outputs atomically into the
//! configured output directory and finishes with `manifest.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::ExperimentConfig;
use super::csv::{read_ser_csv, write_constellation_csv, write_loss_csv, write_ser_csv};
use super::manifest::RunManifest;
use super::plot::render_svg;
use crate::neuralnet::{load_params, write_params, Mlp};
use crate::pipelines::{
    evaluate_ser, learned_constellation, train_end_to_end, train_receiver_dnn, Detector,
    DetectorKind, SerCurve,
};
use crate::rng::{domain, Streams};
use crate::stats::{ks_critical_1pct, ks_statistic, Moments};
use crate::turbulence::{Fading, GammaGamma, GammaGammaCdf};
use crate::{Error, Result};

pub const RX_MODEL: &str = "rx.fsomlp";
pub const TX_MODEL: &str = "tx.fsomlp";

/// Trained networks for a learned detector.
struct Models {
    rx: Mlp,
    tx: Option<Mlp>,
}

fn train_models(cfg: &ExperimentConfig, manifest: &mut RunManifest) -> Result<Models> {
    let dir = &cfg.output_dir;
    match cfg.scenario.detector {
        DetectorKind::QamDnn => {
            let m = train_receiver_dnn(&cfg.scenario, &cfg.train)?;
            manifest.emit(dir, RX_MODEL, write_params(&m.rx).as_bytes())?;
            manifest.emit(dir, "loss.csv", write_loss_csv(&m.report.losses).as_bytes())?;
            Ok(Models { rx: m.rx, tx: None })
        }
        DetectorKind::EndToEndDnn => {
            let m = train_end_to_end(&cfg.scenario, &cfg.train)?;
            manifest.emit(dir, TX_MODEL, write_params(&m.tx).as_bytes())?;
            manifest.emit(dir, RX_MODEL, write_params(&m.rx).as_bytes())?;
            manifest.emit(dir, "loss.csv", write_loss_csv(&m.report.losses).as_bytes())?;
            let points = write_constellation_csv(m.constellation.points());
            manifest.emit(dir, "constellation.csv", points.as_bytes())?;
            Ok(Models {
                rx: m.rx,
                tx: Some(m.tx),
            })
        }
        other => Err(Error::ModelMismatch(format!(
            "detector {other} has nothing to train"
        ))),
    }
}

fn load_models(cfg: &ExperimentConfig, dir: &Path) -> Result<Models> {
    let rx = load_params(dir.join(RX_MODEL))?;
    let tx = match cfg.scenario.detector {
        DetectorKind::EndToEndDnn => {
            let tx = load_params(dir.join(TX_MODEL))?;
            learned_constellation(&tx)?;
            Some(tx)
        }
        _ => None,
    };
    Ok(Models { rx, tx })
}

/// Trains the configured learned detector and saves its parameters.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<RunManifest> {
    let start = Instant::now();
    cfg.validate()?;
    let mut manifest = RunManifest::new("train", cfg.train.seed, cfg.to_config_text());
    train_models(cfg, &mut manifest)?;
    finish(manifest, start, &cfg.output_dir)
}

/// Evaluates SER over the grid, training inline when a learned detector has
/// no `model_dir`.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<(SerCurve, RunManifest)> {
    let start = Instant::now();
    cfg.validate()?;
    let mut manifest = RunManifest::new("sweep", cfg.train.seed, cfg.to_config_text());
    let models = match (cfg.scenario.detector.is_learned(), &cfg.model_dir) {
        (false, _) => None,
        (true, Some(dir)) => Some(load_models(cfg, dir)?),
        (true, None) => Some(train_models(cfg, &mut manifest)?),
    };
    let detector = match (cfg.scenario.detector, &models) {
        (DetectorKind::QamMlPerfect, _) => Detector::QamMlPerfect,
        (DetectorKind::QamMlBlind, _) => Detector::QamMlBlind,
        (DetectorKind::QamDnn, Some(m)) => Detector::QamDnn { rx: &m.rx },
        (DetectorKind::EndToEndDnn, Some(Models { rx, tx: Some(tx) })) => {
            Detector::EndToEnd { tx, rx }
        }
        _ => unreachable!("models are present for learned detectors"),
    };
    let curve = evaluate_ser(
        &cfg.scenario,
        detector,
        &cfg.grid,
        cfg.trials,
        cfg.train.seed,
    )?;
    let dir = &cfg.output_dir;
    manifest.emit(dir, "ser.csv", write_ser_csv(&curve).as_bytes())?;
    if cfg.plot {
        let label = curve_label(cfg);
        let svg = render_svg(&[(label.clone(), curve.clone())], &label);
        manifest.emit(dir, "ser.svg", svg.as_bytes())?;
    }
    Ok((curve, finish(manifest, start, dir)?))
}

fn curve_label(cfg: &ExperimentConfig) -> String {
    let s = &cfg.scenario;
    format!(
        "{} {}-QAM {} {}x{} {} {}",
        s.detector,
        s.modulation_order,
        s.combiner.to_string().to_uppercase(),
        s.n_tx,
        s.n_rx,
        s.user_mode,
        s.fading.name()
    )
}

/// Sample statistics of the configured turbulence regime.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub regime: String,
    pub alpha: f64,
    pub beta: f64,
    pub samples: usize,
    pub mean: f64,
    pub second_moment: f64,
    pub scintillation_index: f64,
    pub expected_scintillation_index: f64,
    pub ks_statistic: f64,
    pub ks_critical_1pct: f64,
}

impl ChannelReport {
    pub fn ks_passes(&self) -> bool {
        self.ks_statistic < self.ks_critical_1pct
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let rows: [(&str, String); 11] = [
            ("regime", self.regime.clone()),
            ("alpha", self.alpha.to_string()),
            ("beta", self.beta.to_string()),
            ("samples", self.samples.to_string()),
            ("mean", format!("{:.6}", self.mean)),
            ("second_moment", format!("{:.6}", self.second_moment)),
            (
                "scintillation_index",
                format!("{:.6}", self.scintillation_index),
            ),
            (
                "expected_scintillation_index",
                format!("{:.6}", self.expected_scintillation_index),
            ),
            ("ks_statistic", format!("{:.6e}", self.ks_statistic)),
            ("ks_critical_1pct", format!("{:.6e}", self.ks_critical_1pct)),
            ("ks_pass", self.ks_passes().to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Draws `channel_samples` intensities and compares them to the closed-form
/// moments and the pdf (via its tabulated CDF).
pub fn cmd_validate_channel(cfg: &ExperimentConfig) -> Result<(ChannelReport, RunManifest)> {
    let start = Instant::now();
    cfg.validate()?;
    let regime = match cfg.scenario.fading {
        Fading::GammaGamma(r) => r,
        Fading::None => {
            return Err(Error::ConfigValue {
                key: "regime".into(),
                msg: "validate-channel needs a turbulence regime".into(),
            })
        }
    };
    let mut rng = Streams::new(cfg.train.seed).rng(&[domain::CHANNEL_CHECK]);
    let dist = GammaGamma::new(&regime);
    let mut samples: Vec<f64> = (0..cfg.channel_samples)
        .map(|_| rand::Rng::sample(&mut rng, dist))
        .collect();
    let m = Moments::of(&samples);
    samples.sort_by(f64::total_cmp);
    let table = GammaGammaCdf::new(&regime, 4000);
    let report = ChannelReport {
        regime: cfg.scenario.fading.name(),
        alpha: regime.alpha(),
        beta: regime.beta(),
        samples: samples.len(),
        mean: m.mean,
        second_moment: m.second,
        scintillation_index: m.scintillation_index(),
        expected_scintillation_index: regime.scintillation_index(),
        ks_statistic: ks_statistic(&samples, |x| table.cdf(x)),
        ks_critical_1pct: ks_critical_1pct(samples.len()),
    };
    let mut manifest = RunManifest::new("validate-channel", cfg.train.seed, cfg.to_config_text());
    manifest.emit(
        &cfg.output_dir,
        "channel_report.txt",
        report.to_text().as_bytes(),
    )?;
    let manifest = finish(manifest, start, &cfg.output_dir)?;
    Ok((report, manifest))
}

/// Plots one or more SER CSVs into `out_dir/plot.svg`. Curves are labeled
/// by file path.
pub fn cmd_plot(inputs: &[PathBuf], out_dir: &Path, title: &str) -> Result<RunManifest> {
    let start = Instant::now();
    if inputs.is_empty() {
        return Err(Error::InvalidParameter(
            "plot needs at least one CSV".into(),
        ));
    }
    let mut curves = Vec::with_capacity(inputs.len());
    for path in inputs {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let label = path.with_extension("").display().to_string();
        curves.push((label, read_ser_csv(&text, path)?));
    }
    let inputs_list: Vec<String> = inputs.iter().map(|p| p.display().to_string()).collect();
    let mut manifest = RunManifest::new("plot", 0, format!("inputs = {}\n", inputs_list.join(",")));
    manifest.emit(out_dir, "plot.svg", render_svg(&curves, title).as_bytes())?;
    finish(manifest, start, out_dir)
}

fn finish(mut manifest: RunManifest, start: Instant, dir: &Path) -> Result<RunManifest> {
    manifest.duration_seconds = start.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(manifest)
}

/// Process exit status for an error: 2 config, 3 divergence, 4 I/O, 1 other.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ConfigParse { .. } | Error::ConfigValue { .. } => 2,
        Error::Divergence { .. } => 3,
        Error::Io { .. } => 4,
        _ => 1,
    }
}
