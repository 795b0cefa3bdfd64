//! Trains the receiver-only detector on a fixed QAM transmitter and
//! compares it with ML detection. The trained network is written to
//! `target/dnn_receiver/rx.fsomlp`.
//!
//! ```bash
//! cargo run --release --example dnn_receiver -- 4
//! ```

use fso_dnn::neuralnet::save_params;
use fso_dnn::pipelines::{
    evaluate_ser, train_receiver_dnn, Detector, DetectorKind, ScenarioSpec, TrainConfig,
};
use fso_dnn::turbulence::{Fading, TurbulenceRegime};

fn main() -> fso_dnn::Result<()> {
    let order: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4);
    let spec = ScenarioSpec::siso(
        Fading::GammaGamma(TurbulenceRegime::STRONG),
        order,
        DetectorKind::QamDnn,
    );
    let cfg = TrainConfig::default();
    let model = train_receiver_dnn(&spec, &cfg)?;
    let losses = &model.report.losses;
    for i in [0, 9, 99, losses.len() - 1] {
        println!("iteration {:>4}: loss {:.4}", i + 1, losses[i]);
    }
    save_params(&model.rx, "target/dnn_receiver/rx.fsomlp")?;

    let grid = [0.0, 10.0, 20.0, 30.0];
    let dnn = evaluate_ser(&spec, Detector::QamDnn { rx: &model.rx }, &grid, 50_000, 2)?;
    let ml_spec = spec.clone().with_detector(DetectorKind::QamMlPerfect);
    let ml = evaluate_ser(&ml_spec, Detector::QamMlPerfect, &grid, 50_000, 2)?;
    let blind_spec = spec.with_detector(DetectorKind::QamMlBlind);
    let blind = evaluate_ser(&blind_spec, Detector::QamMlBlind, &grid, 50_000, 2)?;
    println!("\nEs/N0  DNN        ML (perfect)  ML (blind)");
    for ((d, m), b) in dnn.points.iter().zip(&ml.points).zip(&blind.points) {
        println!(
            "{:>5}  {:.3e}  {:.3e}     {:.3e}",
            d.es_n0_db, d.ser, m.ser, b.ser
        );
    }
    Ok(())
}
