//! Jointly trains a transmitter and receiver network and prints the
//! learned constellation next to plain QAM.
//!
//! ```bash
//! cargo run --release --example end_to_end_shaping -- strong 4
//! ```

use fso_dnn::modem::qam_constellation;
use fso_dnn::pipelines::{
    evaluate_ser, train_end_to_end, train_receiver_dnn, Detector, DetectorKind, ScenarioSpec,
    TrainConfig,
};
use fso_dnn::turbulence::Fading;

fn main() -> fso_dnn::Result<()> {
    let mut args = std::env::args().skip(1);
    let fading: Fading = args
        .next()
        .unwrap_or_else(|| "strong".into())
        .parse()
        .map_err(fso_dnn::Error::InvalidParameter)?;
    let order: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let cfg = TrainConfig::default();

    let spec = ScenarioSpec::siso(fading, order, DetectorKind::EndToEndDnn);
    let e2e = train_end_to_end(&spec, &cfg)?;
    let qam = qam_constellation(order)?;
    println!("symbol  learned                QAM");
    for (i, (p, q)) in e2e
        .constellation
        .points()
        .iter()
        .zip(qam.points())
        .enumerate()
    {
        println!(
            "{i:>6}  ({:+.3}, {:+.3})       ({:+.3}, {:+.3})",
            p.re, p.im, q.re, q.im
        );
    }
    println!(
        "min distance: learned {:.3}, QAM {:.3}",
        e2e.constellation.min_distance(),
        qam.min_distance()
    );

    let rx_spec = spec.clone().with_detector(DetectorKind::QamDnn);
    let rx = train_receiver_dnn(&rx_spec, &cfg)?;
    let grid = [0.0, 10.0, 20.0, 30.0];
    let learned = evaluate_ser(
        &spec,
        Detector::EndToEnd {
            tx: &e2e.tx,
            rx: &e2e.rx,
        },
        &grid,
        50_000,
        4,
    )?;
    let receiver_only = evaluate_ser(&rx_spec, Detector::QamDnn { rx: &rx.rx }, &grid, 50_000, 4)?;
    println!("\nEs/N0  end-to-end  receiver-only");
    for (a, b) in learned.points.iter().zip(&receiver_only.points) {
        println!("{:>5}  {:.3e}   {:.3e}", a.es_n0_db, a.ser, b.ser);
    }
    Ok(())
}
