//! Samples each turbulence regime and compares the empirical moments and
//! distribution with the closed forms.
//!
//! ```bash
//! cargo run --release --example channel_statistics -- 1000000
//! ```

use fso_dnn::rng::Streams;
use fso_dnn::stats::{ks_critical_1pct, ks_statistic, Moments};
use fso_dnn::turbulence::{gamma_gamma_pdf, GammaGamma, GammaGammaCdf, TurbulenceRegime};
use rand::Rng;

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1_000_000);
    let streams = Streams::new(1);
    println!("regime     alpha  beta   mean     SI (sample)  SI (closed)  KS        KS crit");
    for (i, (name, regime)) in [
        ("strong", TurbulenceRegime::STRONG),
        ("moderate", TurbulenceRegime::MODERATE),
        ("weak", TurbulenceRegime::WEAK),
    ]
    .into_iter()
    .enumerate()
    {
        let mut rng = streams.rng(&[i as u64]);
        let dist = GammaGamma::new(&regime);
        let mut samples: Vec<f64> = (0..n).map(|_| rng.sample(dist)).collect();
        let m = Moments::of(&samples);
        samples.sort_by(f64::total_cmp);
        let table = GammaGammaCdf::new(&regime, 4000);
        let ks = ks_statistic(&samples, |x| table.cdf(x));
        println!(
            "{name:<10} {:<6} {:<6} {:<8.4} {:<12.4} {:<12.4} {:<9.2e} {:.2e}",
            regime.alpha(),
            regime.beta(),
            m.mean,
            m.scintillation_index(),
            regime.scintillation_index(),
            ks,
            ks_critical_1pct(n)
        );
    }

    println!("\npdf at a few intensities:");
    for x in [0.1, 0.5, 1.0, 2.0, 4.0] {
        let row: Vec<String> = [
            TurbulenceRegime::STRONG,
            TurbulenceRegime::MODERATE,
            TurbulenceRegime::WEAK,
        ]
        .iter()
        .map(|r| format!("{:.5}", gamma_gamma_pdf(r, x).unwrap()))
        .collect();
        println!("  I = {x:<4} {}", row.join("  "));
    }
}
