use std::fmt;
use std::str::FromStr;

use crate::link::{Combiner, LinkConfig};
use crate::turbulence::{Fading, TurbulenceRegime};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UserMode {
    SingleUser,
    /// The user with the best instantaneous channel is served.
    MultiuserAllocation,
    /// All users transmit at once; user 0 is decoded.
    MultiuserInterference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    QamMlPerfect,
    QamMlBlind,
    QamDnn,
    EndToEndDnn,
}

macro_rules! string_enum {
    ($ty:ty { $($variant:path => $name:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
                match s {
                    $($name => Ok($variant),)+
                    other => Err(format!(
                        "unknown value `{other}` (expected one of: {})",
                        [$($name),+].join(", ")
                    )),
                }
            }
        }
    };
}

string_enum!(UserMode {
    UserMode::SingleUser => "single_user",
    UserMode::MultiuserAllocation => "multiuser_allocation",
    UserMode::MultiuserInterference => "multiuser_interference",
});

string_enum!(DetectorKind {
    DetectorKind::QamMlPerfect => "qam_ml_perfect",
    DetectorKind::QamMlBlind => "qam_ml_blind",
    DetectorKind::QamDnn => "qam_dnn",
    DetectorKind::EndToEndDnn => "end_to_end_dnn",
});

impl DetectorKind {
    pub fn is_learned(&self) -> bool {
        matches!(self, DetectorKind::QamDnn | DetectorKind::EndToEndDnn)
    }
}

/// One simulated link scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub user_mode: UserMode,
    pub n_users: usize,
    pub combiner: Combiner,
    pub n_tx: usize,
    pub n_rx: usize,
    pub fading: Fading,
    pub modulation_order: usize,
    pub detector: DetectorKind,
    pub conversion_gain: f64,
    /// Samples per channel realization seen by the blind gain estimator.
    pub blind_block_len: usize,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            user_mode: UserMode::SingleUser,
            n_users: 1,
            combiner: Combiner::Egc,
            n_tx: 1,
            n_rx: 1,
            fading: Fading::GammaGamma(TurbulenceRegime::STRONG),
            modulation_order: 16,
            detector: DetectorKind::QamDnn,
            conversion_gain: 1.0,
            blind_block_len: 1000,
        }
    }
}

impl ScenarioSpec {
    pub fn siso(fading: Fading, modulation_order: usize, detector: DetectorKind) -> Self {
        Self {
            fading,
            modulation_order,
            detector,
            ..Self::default()
        }
    }

    pub fn with_users(mut self, user_mode: UserMode, n_users: usize) -> Self {
        self.user_mode = user_mode;
        self.n_users = n_users;
        self
    }

    pub fn with_apertures(mut self, combiner: Combiner, n_tx: usize, n_rx: usize) -> Self {
        self.combiner = combiner;
        self.n_tx = n_tx;
        self.n_rx = n_rx;
        self
    }

    pub fn with_detector(mut self, detector: DetectorKind) -> Self {
        self.detector = detector;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| {
            Err(Error::ConfigValue {
                key: key.into(),
                msg,
            })
        };
        match self.user_mode {
            UserMode::SingleUser if self.n_users != 1 => {
                return bad("n_users", "single_user requires n_users = 1".into())
            }
            UserMode::MultiuserAllocation | UserMode::MultiuserInterference if self.n_users < 2 => {
                return bad(
                    "n_users",
                    format!("{} requires n_users >= 2", self.user_mode),
                )
            }
            _ => {}
        }
        if self.n_tx == 0 {
            return bad("n_tx", "must be >= 1".into());
        }
        if self.n_rx == 0 {
            return bad("n_rx", "must be >= 1".into());
        }
        if let Err(e) = crate::modem::qam_constellation(self.modulation_order) {
            return bad("modulation_order", e.to_string());
        }
        if !(self.conversion_gain > 0.0 && self.conversion_gain.is_finite()) {
            return bad("conversion_gain", "must be positive".into());
        }
        if self.blind_block_len < 2 {
            return bad("blind_block_len", "must be >= 2".into());
        }
        Ok(())
    }

    pub fn link_config(&self, noise_variance: f64) -> Result<LinkConfig> {
        LinkConfig::new(
            self.conversion_gain,
            self.n_tx,
            self.n_rx,
            self.n_users,
            noise_variance,
        )
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    /// Fresh samples generated per iteration, in units of batches.
    pub samples_per_batch_ratio: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub train_es_n0_db: f64,
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 64,
            samples_per_batch_ratio: 4,
            iterations: 1000,
            learning_rate: 0.005,
            train_es_n0_db: 15.0,
            hidden_layers: 4,
            hidden_width: 40,
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str| {
            Err(Error::ConfigValue {
                key: key.into(),
                msg: "must be positive".into(),
            })
        };
        if self.batch_size == 0 {
            return bad("batch_size");
        }
        if self.samples_per_batch_ratio == 0 {
            return bad("samples_per_batch_ratio");
        }
        if self.iterations == 0 {
            return bad("iterations");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate");
        }
        if self.hidden_width == 0 {
            return bad("hidden_width");
        }
        if self.train_es_n0_db.is_nan() {
            return Err(Error::ConfigValue {
                key: "train_es_n0_db".into(),
                msg: "must be a number".into(),
            });
        }
        Ok(())
    }

    /// Layer widths `[input, hidden..., output]`.
    pub fn layer_dims(&self, input: usize, output: usize) -> Vec<usize> {
        let mut dims = vec![input];
        dims.extend(std::iter::repeat_n(self.hidden_width, self.hidden_layers));
        dims.push(output);
        dims
    }
}
