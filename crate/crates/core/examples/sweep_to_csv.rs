//! Drives the experiment harness from a config string: sweeps two
//! detectors, then plots both curves in one SVG.
//!
//! ```bash
//! cargo run --release --example sweep_to_csv -- target/sweep_demo
//! ```

use std::path::PathBuf;

use fso_dnn::harness::{cmd_plot, cmd_sweep, ExperimentConfig};

const BASE: &str = "
# 2x2 EGC under moderate turbulence
regime = moderate
combiner = egc
n_tx = 2
n_rx = 2
modulation_order = 16
trials = 20000
grid = 0,5,10,15,20,25
seed = 11
";

fn main() -> fso_dnn::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "target/sweep_demo".into()),
    );
    let mut csvs = Vec::new();
    for detector in ["qam_ml_perfect", "qam_ml_blind"] {
        let mut cfg = ExperimentConfig::parse(BASE)?;
        cfg.apply_overrides(&[format!("detector={detector}")])?;
        cfg.output_dir = out.join(detector);
        let (curve, manifest) = cmd_sweep(&cfg)?;
        println!(
            "{detector}: {} points in {:.1} s, files {:?}",
            curve.points.len(),
            manifest.duration_seconds,
            manifest.files.iter().map(|f| &f.name).collect::<Vec<_>>()
        );
        csvs.push(cfg.output_dir.join("ser.csv"));
    }
    cmd_plot(&csvs, &out, "2x2 EGC, moderate turbulence")?;
    println!("plot: {}", out.join("plot.svg").display());
    Ok(())
}
