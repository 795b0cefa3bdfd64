//! Perfect-CSI ML detection of square QAM over a non-fading link, next to
//! the closed-form SER.
//!
//! ```bash
//! cargo run --release --example qam_awgn_baseline
//! ```

use fso_dnn::modem::qam_constellation;
use fso_dnn::pipelines::{evaluate_ser, Detector, DetectorKind, ScenarioSpec};
use fso_dnn::turbulence::Fading;

fn q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Square M-QAM at unit average energy.
fn analytic_ser(order: usize, es_n0_db: f64) -> f64 {
    let m = order as f64;
    let es_n0 = 10f64.powf(es_n0_db / 10.0);
    let p = 2.0 * (1.0 - 1.0 / m.sqrt()) * q((3.0 * es_n0 / (m - 1.0)).sqrt());
    1.0 - (1.0 - p) * (1.0 - p)
}

fn main() {
    let grid = [0.0, 4.0, 8.0, 12.0, 16.0];
    for order in [4, 16, 64] {
        let c = qam_constellation(order).unwrap();
        println!(
            "{order}-QAM: energy {:.3}, min distance {:.4}",
            c.average_energy(),
            c.min_distance()
        );
        let spec = ScenarioSpec::siso(Fading::None, order, DetectorKind::QamMlPerfect);
        let curve = evaluate_ser(&spec, Detector::QamMlPerfect, &grid, 200_000, 1).unwrap();
        for p in &curve.points {
            println!(
                "  {:>4} dB  simulated {:.3e} [{:.3e}, {:.3e}]  analytic {:.3e}",
                p.es_n0_db,
                p.ser,
                p.ci_low,
                p.ci_high,
                analytic_ser(order, p.es_n0_db)
            );
        }
    }
}
