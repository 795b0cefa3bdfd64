//! `key = value` experiment configuration.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::pipelines::{DetectorKind, ScenarioSpec, TrainConfig, UserMode};
use crate::{Error, Result};

/// Keys accepted in a config file, in snapshot order.
pub const KEYS: &[&str] = &[
    "user_mode",
    "n_users",
    "combiner",
    "n_tx",
    "n_rx",
    "regime",
    "modulation_order",
    "detector",
    "conversion_gain",
    "blind_block_len",
    "hidden_layers",
    "hidden_width",
    "activation",
    "loss",
    "optimizer",
    "batch_size",
    "samples_per_batch_ratio",
    "iterations",
    "learning_rate",
    "train_es_n0_db",
    "seed",
    "trials",
    "grid",
    "channel_samples",
    "output_dir",
    "model_dir",
    "plot",
];

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    /// Also carries the master seed.
    pub train: TrainConfig,
    pub trials: u64,
    pub grid: Vec<f64>,
    /// Samples drawn by `validate-channel`.
    pub channel_samples: usize,
    pub output_dir: PathBuf,
    /// Directory holding pre-trained `rx.fsomlp` / `tx.fsomlp` for sweeps.
    pub model_dir: Option<PathBuf>,
    /// Emit `ser.svg` next to `ser.csv` in sweeps.
    pub plot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioSpec::default(),
            train: TrainConfig::default(),
            trials: 10_000,
            grid: (0..=6).map(|i| 5.0 * i as f64).collect(),
            channel_samples: 1_000_000,
            output_dir: PathBuf::from("out"),
            model_dir: None,
            plot: true,
        }
    }
}

fn parse<T: FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| format!("cannot parse `{value}`: {e}"))
}

fn fixed(value: &str, allowed: &str) -> std::result::Result<(), String> {
    if value == allowed {
        Ok(())
    } else {
        Err(format!("only `{allowed}` is supported, got `{value}`"))
    }
}

/// Parses a comma-separated list of dB values.
pub fn parse_grid(value: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|v| {
            let v = v.trim();
            let x: f64 = parse(v)?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("grid value `{v}` is not finite"))
            }
        })
        .collect()
}

impl ExperimentConfig {
    /// Parses config text; missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::ConfigParse { line: line_no, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if !seen.insert(key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            cfg.set(key, value).map_err(err)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies command-line `key=value` overrides, then revalidates.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (key, value) = o.split_once('=').ok_or_else(|| Error::ConfigValue {
                key: o.to_string(),
                msg: "override must look like key=value".into(),
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::ConfigValue {
                    key: key.into(),
                    msg: "unknown key".into(),
                });
            }
            self.set(key, value.trim())
                .map_err(|msg| Error::ConfigValue {
                    key: key.into(),
                    msg,
                })?;
        }
        self.validate()
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let s = &mut self.scenario;
        let t = &mut self.train;
        match key {
            "user_mode" => s.user_mode = parse::<UserMode>(value)?,
            "n_users" => s.n_users = parse(value)?,
            "combiner" => s.combiner = parse(value)?,
            "n_tx" => s.n_tx = parse(value)?,
            "n_rx" => s.n_rx = parse(value)?,
            "regime" => s.fading = parse(value)?,
            "modulation_order" => s.modulation_order = parse(value)?,
            "detector" => s.detector = parse::<DetectorKind>(value)?,
            "conversion_gain" => s.conversion_gain = parse(value)?,
            "blind_block_len" => s.blind_block_len = parse(value)?,
            "hidden_layers" => t.hidden_layers = parse(value)?,
            "hidden_width" => t.hidden_width = parse(value)?,
            "activation" => fixed(value, "relu")?,
            "loss" => fixed(value, "softmax_cross_entropy")?,
            "optimizer" => fixed(value, "adam")?,
            "batch_size" => t.batch_size = parse(value)?,
            "samples_per_batch_ratio" => t.samples_per_batch_ratio = parse(value)?,
            "iterations" => t.iterations = parse(value)?,
            "learning_rate" => t.learning_rate = parse(value)?,
            "train_es_n0_db" => t.train_es_n0_db = parse(value)?,
            "seed" => t.seed = parse(value)?,
            "trials" => self.trials = parse(value)?,
            "grid" => self.grid = parse_grid(value)?,
            "channel_samples" => self.channel_samples = parse(value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "model_dir" => {
                self.model_dir = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            "plot" => self.plot = parse(value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.train.validate()?;
        let bad = |key: &str, msg: &str| {
            Err(Error::ConfigValue {
                key: key.into(),
                msg: msg.into(),
            })
        };
        if self.trials == 0 {
            return bad("trials", "must be >= 1");
        }
        if self.grid.is_empty() {
            return bad("grid", "needs at least one value");
        }
        if self.channel_samples < 2 {
            return bad("channel_samples", "must be >= 2");
        }
        Ok(())
    }

    /// Canonical text form listing every key; parses back to `self`.
    pub fn to_config_text(&self) -> String {
        let s = &self.scenario;
        let t = &self.train;
        let grid: Vec<String> = self.grid.iter().map(|g| g.to_string()).collect();
        let model_dir = self
            .model_dir
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_default();
        let values = [
            s.user_mode.to_string(),
            s.n_users.to_string(),
            s.combiner.to_string(),
            s.n_tx.to_string(),
            s.n_rx.to_string(),
            s.fading.name(),
            s.modulation_order.to_string(),
            s.detector.to_string(),
            s.conversion_gain.to_string(),
            s.blind_block_len.to_string(),
            t.hidden_layers.to_string(),
            t.hidden_width.to_string(),
            "relu".into(),
            "softmax_cross_entropy".into(),
            "adam".into(),
            t.batch_size.to_string(),
            t.samples_per_batch_ratio.to_string(),
            t.iterations.to_string(),
            t.learning_rate.to_string(),
            t.train_es_n0_db.to_string(),
            t.seed.to_string(),
            self.trials.to_string(),
            grid.join(","),
            self.channel_samples.to_string(),
            self.output_dir.display().to_string(),
            model_dir,
            self.plot.to_string(),
        ];
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::Combiner;
    use crate::turbulence::{Fading, TurbulenceRegime};

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = ExperimentConfig::parse("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.scenario.modulation_order, 16);
        assert_eq!(cfg.scenario.user_mode, UserMode::SingleUser);
        assert_eq!((cfg.scenario.n_tx, cfg.scenario.n_rx), (1, 1));
        assert_eq!(
            cfg.scenario.fading,
            Fading::GammaGamma(TurbulenceRegime::STRONG)
        );
        assert_eq!(cfg.train.batch_size, 64);
        assert_eq!(cfg.train.samples_per_batch_ratio, 4);
        assert_eq!(cfg.train.iterations, 1000);
        assert_eq!(cfg.train.learning_rate, 0.005);
        assert_eq!((cfg.train.hidden_layers, cfg.train.hidden_width), (4, 40));
    }

    #[test]
    fn single_override() {
        let cfg = ExperimentConfig::parse("# comment\nmodulation_order = 4  # trailing\n").unwrap();
        let mut want = ExperimentConfig::default();
        want.scenario.modulation_order = 4;
        assert_eq!(cfg, want);
    }

    #[test]
    fn unsupported_order_names_key() {
        match ExperimentConfig::parse("modulation_order = 5") {
            Err(Error::ConfigValue { key, .. }) => assert_eq!(key, "modulation_order"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_name_line() {
        for (text, line) in [
            ("seed = 1\nbogus = 3", 2),
            ("\n\nno equals sign", 3),
            ("n_rx = two", 1),
            ("seed = 1\nseed = 2", 2),
            ("activation = tanh", 1),
        ] {
            match ExperimentConfig::parse(text) {
                Err(Error::ConfigParse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn snapshot_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario = cfg
            .scenario
            .with_users(UserMode::MultiuserInterference, 3)
            .with_apertures(Combiner::Sc, 2, 3)
            .with_detector(DetectorKind::QamMlBlind);
        cfg.scenario.fading = Fading::GammaGamma(TurbulenceRegime::new(2.5, 1.25).unwrap());
        cfg.train.learning_rate = 1e-3;
        cfg.grid = vec![-2.5, 0.0, 7.25];
        cfg.model_dir = Some(PathBuf::from("models/a"));
        cfg.plot = false;
        let back = ExperimentConfig::parse(&cfg.to_config_text()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn overrides_apply_and_validate() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_overrides(&["n_rx=2", "combiner = sc", "grid=0,10,20"])
            .unwrap();
        assert_eq!(cfg.scenario.n_rx, 2);
        assert_eq!(cfg.scenario.combiner, Combiner::Sc);
        assert_eq!(cfg.grid, vec![0.0, 10.0, 20.0]);
        assert!(matches!(
            cfg.apply_overrides(&["user_mode=multiuser_allocation"]),
            Err(Error::ConfigValue { key, .. }) if key == "n_users"
        ));
        assert!(matches!(
            ExperimentConfig::default().apply_overrides(&["nope=1"]),
            Err(Error::ConfigValue { .. })
        ));
    }
}
