//! Single user, best-channel allocation and unmanaged interference, all
//! with perfect-CSI ML on a 2x2 EGC link.
//!
//! ```bash
//! cargo run --release --example multiuser_scenarios
//! ```

use fso_dnn::link::Combiner;
use fso_dnn::pipelines::{evaluate_ser, Detector, DetectorKind, ScenarioSpec, UserMode};
use fso_dnn::turbulence::{Fading, TurbulenceRegime};

fn main() {
    let grid = [5.0, 10.0, 15.0, 20.0, 25.0];
    let base = ScenarioSpec::siso(
        Fading::GammaGamma(TurbulenceRegime::MODERATE),
        4,
        DetectorKind::QamMlPerfect,
    )
    .with_apertures(Combiner::Egc, 2, 2);
    let cases = [
        ("single", base.clone()),
        (
            "alloc x2",
            base.clone().with_users(UserMode::MultiuserAllocation, 2),
        ),
        (
            "alloc x4",
            base.clone().with_users(UserMode::MultiuserAllocation, 4),
        ),
        (
            "alloc x8",
            base.clone().with_users(UserMode::MultiuserAllocation, 8),
        ),
        (
            "interf x2",
            base.clone().with_users(UserMode::MultiuserInterference, 2),
        ),
        (
            "interf x3",
            base.clone().with_users(UserMode::MultiuserInterference, 3),
        ),
    ];
    for (name, spec) in cases {
        let curve = evaluate_ser(&spec, Detector::QamMlPerfect, &grid, 100_000, 3).unwrap();
        let row: Vec<String> = curve
            .points
            .iter()
            .map(|p| format!("{}dB {:.2e}", p.es_n0_db, p.ser))
            .collect();
        println!("{name:<10} {}", row.join("  "));
    }
}
