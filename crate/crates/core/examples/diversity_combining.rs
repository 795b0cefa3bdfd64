//! SER of perfect-CSI ML under strong turbulence for several aperture
//! counts with equal-gain and selection combining.
//!
//! ```bash
//! cargo run --release --example diversity_combining
//! ```

use fso_dnn::link::Combiner;
use fso_dnn::pipelines::{evaluate_ser, Detector, DetectorKind, ScenarioSpec};
use fso_dnn::turbulence::{Fading, TurbulenceRegime};

fn main() {
    let grid = [5.0, 10.0, 15.0, 20.0, 25.0, 30.0];
    let base = ScenarioSpec::siso(
        Fading::GammaGamma(TurbulenceRegime::STRONG),
        16,
        DetectorKind::QamMlPerfect,
    );
    let header: Vec<String> = grid.iter().map(|g| format!("{g:>9}")).collect();
    println!("{:<12}{}", "setup", header.join(""));
    for (combiner, n_tx, n_rx) in [
        (Combiner::Egc, 1, 1),
        (Combiner::Sc, 1, 2),
        (Combiner::Egc, 1, 2),
        (Combiner::Sc, 2, 2),
        (Combiner::Egc, 2, 2),
        (Combiner::Egc, 4, 4),
    ] {
        let spec = base.clone().with_apertures(combiner, n_tx, n_rx);
        let curve = evaluate_ser(&spec, Detector::QamMlPerfect, &grid, 100_000, 7).unwrap();
        let row: Vec<String> = curve
            .points
            .iter()
            .map(|p| format!("{:>9.2e}", p.ser))
            .collect();
        let label = format!("{} {n_tx}x{n_rx}", combiner.to_string().to_uppercase());
        println!("{label:<12}{}", row.join(""));
    }
}
