//! Free-space optical (FSO) MIMO link simulation with learned blind detection.
//!
//! The crate covers the full chain of a multiuser FSO-MIMO uplink under
//! Gamma-Gamma atmospheric turbulence:
//!
//! - [`turbulence`]: Gamma-Gamma intensity sampling, closed-form pdf and
//!   per-slot channel matrices.
//! - [`modem`]: square QAM constellations, one-hot labels and energy
//!   normalization.
//! - [`link`]: transmission, equal-gain / selection combining, ML detection
//!   with perfect or blindly estimated gains, and multiuser composition.
//! - [`neuralnet`]: a small dense network engine (ReLU MLP, softmax
//!   cross-entropy, backpropagation, Adam, gradient checking, text
//!   persistence).
//! - [`pipelines`]: the receiver-only DNN detector, the jointly trained
//!   transmitter/receiver pair, and Monte Carlo symbol-error-rate sweeps.
//! - [`harness`]: `key = value` experiment configs, the `train` / `sweep` /
//!   `validate-channel` / `plot` commands, CSV/SVG output and run manifests.
//!
//! Every stochastic routine takes its randomness from [`rng::Streams`], so a
//! single master seed reproduces every result bit for bit, independent of
//! how many threads evaluate Monte Carlo trials.
//!
//! ```
//! use fso_dnn::pipelines::{evaluate_ser, Detector, DetectorKind, ScenarioSpec};
//! use fso_dnn::turbulence::{Fading, TurbulenceRegime};
//!
//! let spec = ScenarioSpec::siso(
//!     Fading::GammaGamma(TurbulenceRegime::STRONG),
//!     16,
//!     DetectorKind::QamMlPerfect,
//! );
//! let curve = evaluate_ser(&spec, Detector::QamMlPerfect, &[10.0, 20.0], 2_000, 1).unwrap();
//! assert!(curve.points[1].ser < curve.points[0].ser);
//! ```
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod error;
pub mod harness;
pub mod link;
pub mod modem;
pub mod neuralnet;
pub mod pipelines;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stats;
pub mod turbulence;

pub use error::{Error, Result};
pub use num_complex::Complex64;
