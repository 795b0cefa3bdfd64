//! How much the second-moment gain estimate costs compared with knowing
//! the drawn gains, as a function of the estimation block length.
//!
//! ```bash
//! cargo run --release --example blind_vs_perfect_csi
//! ```

use fso_dnn::pipelines::{evaluate_ser, Detector, DetectorKind, ScenarioSpec};
use fso_dnn::turbulence::{Fading, TurbulenceRegime};

fn main() {
    let grid = [10.0, 20.0, 30.0];
    let trials = 20_000;
    let base = ScenarioSpec::siso(
        Fading::GammaGamma(TurbulenceRegime::STRONG),
        16,
        DetectorKind::QamMlPerfect,
    );
    let perfect = evaluate_ser(&base, Detector::QamMlPerfect, &grid, trials, 5).unwrap();
    let fmt = |c: &fso_dnn::pipelines::SerCurve| {
        c.points
            .iter()
            .map(|p| format!("{:.3e}", p.ser))
            .collect::<Vec<_>>()
            .join("  ")
    };
    println!("Es/N0 (dB)      {grid:?}");
    println!("perfect CSI     {}", fmt(&perfect));
    for block in [4, 16, 64, 1000] {
        let mut spec = base.clone().with_detector(DetectorKind::QamMlBlind);
        spec.blind_block_len = block;
        let blind = evaluate_ser(&spec, Detector::QamMlBlind, &grid, trials, 5).unwrap();
        println!("blind, {block:>4} obs {}", fmt(&blind));
    }
}
