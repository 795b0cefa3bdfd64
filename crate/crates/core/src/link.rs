//! Turbulent-channel transmission, diversity combining and classical ML
//! detection.
//!
//! Every user splits its power over `N_t` apertures, so receive aperture `i`
//! observes `y_i = (R / N_t) Σ_j I_{i,j} x + n_i` with circularly symmetric
//! complex Gaussian noise of total variance σ².

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::modem::{nearest_scaled, Constellation};
use crate::turbulence::{ChannelMatrix, UserGains};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub conversion_gain: f64,
    pub n_tx: usize,
    pub n_rx: usize,
    pub n_users: usize,
    pub noise_variance: f64,
}

impl LinkConfig {
    /// `noise_variance` may be zero, which models a noiseless link.
    pub fn new(
        conversion_gain: f64,
        n_tx: usize,
        n_rx: usize,
        n_users: usize,
        noise_variance: f64,
    ) -> Result<Self> {
        if !(conversion_gain > 0.0 && conversion_gain.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "conversion gain must be positive (got {conversion_gain})"
            )));
        }
        if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be non-negative (got {noise_variance})"
            )));
        }
        if n_tx == 0 || n_rx == 0 || n_users == 0 {
            return Err(Error::InvalidParameter(
                "aperture and user counts must be >= 1".into(),
            ));
        }
        Ok(Self {
            conversion_gain,
            n_tx,
            n_rx,
            n_users,
            noise_variance,
        })
    }

    /// Amplitude scale `R / N_t` applied to every link.
    pub fn per_link_scale(&self) -> f64 {
        self.conversion_gain / self.n_tx as f64
    }
}

/// Noise variance `N0` for a given Es/N0 in dB with `Es = 1`.
pub fn noise_variance_for_es_n0_db(es_n0_db: f64) -> f64 {
    10f64.powf(-es_n0_db / 10.0)
}

/// Per-aperture samples of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedVector(pub Vec<Complex64>);

impl ReceivedVector {
    pub fn zeros(n_rx: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n_rx])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.0
    }
}

/// One circularly symmetric complex Gaussian sample of total variance `variance`.
pub fn complex_noise<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Complex64 {
    let sd = (0.5 * variance).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(sd * re, sd * im)
}

pub fn draw_noise<R: Rng + ?Sized>(n_rx: usize, variance: f64, rng: &mut R) -> ReceivedVector {
    ReceivedVector((0..n_rx).map(|_| complex_noise(variance, rng)).collect())
}

/// Faded signal of one user at every receive aperture, without noise.
pub fn transmit_noiseless(x: Complex64, gains: UserGains<'_>, cfg: &LinkConfig) -> ReceivedVector {
    let scale = cfg.per_link_scale();
    ReceivedVector(
        (0..gains.n_rx())
            .map(|i| x * (scale * gains.row_sum(i)))
            .collect(),
    )
}

pub fn transmit<R: Rng + ?Sized>(
    x: Complex64,
    gains: UserGains<'_>,
    cfg: &LinkConfig,
    rng: &mut R,
) -> ReceivedVector {
    let mut y = transmit_noiseless(x, gains, cfg);
    for v in &mut y.0 {
        *v += complex_noise(cfg.noise_variance, rng);
    }
    y
}

/// Sums the noiseless contributions of all users and adds `noise` once.
pub fn superpose_interference(
    per_user: &[ReceivedVector],
    noise: &ReceivedVector,
) -> Result<ReceivedVector> {
    let n = noise.len();
    let mut out = ReceivedVector::zeros(n);
    for user in per_user {
        if user.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: user.len(),
            });
        }
        for (o, v) in out.0.iter_mut().zip(&user.0) {
            *o += v;
        }
    }
    for (o, v) in out.0.iter_mut().zip(&noise.0) {
        *o += v;
    }
    Ok(out)
}

pub fn egc_combine(y: &ReceivedVector) -> Result<Complex64> {
    if y.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot combine an empty vector".into(),
        ));
    }
    Ok(y.0.iter().sum())
}

/// Aperture with the largest squared row-gain sum, lowest index on ties.
pub fn select_aperture(gains: UserGains<'_>) -> usize {
    let mut best = 0;
    let mut best_metric = f64::NEG_INFINITY;
    for i in 0..gains.n_rx() {
        let s = gains.row_sum(i);
        if s * s > best_metric {
            best_metric = s * s;
            best = i;
        }
    }
    best
}

pub fn sc_select(y: &ReceivedVector, gains: UserGains<'_>) -> Result<(usize, Complex64)> {
    if y.len() != gains.n_rx() {
        return Err(Error::Dimension {
            expected: gains.n_rx(),
            got: y.len(),
        });
    }
    let p = select_aperture(gains);
    Ok((p, y.0[p]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combiner {
    Egc,
    Sc,
}

impl Combiner {
    /// Coefficient multiplying the user's symbol after combining.
    pub fn effective_gain(&self, gains: UserGains<'_>, cfg: &LinkConfig) -> f64 {
        cfg.per_link_scale()
            * match self {
                Combiner::Egc => gains.total(),
                Combiner::Sc => gains.row_sum(select_aperture(gains)),
            }
    }

    /// Variance of the noise term after combining.
    pub fn combined_noise_variance(&self, cfg: &LinkConfig) -> f64 {
        match self {
            Combiner::Egc => cfg.n_rx as f64 * cfg.noise_variance,
            Combiner::Sc => cfg.noise_variance,
        }
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Combiner::Egc => "egc",
            Combiner::Sc => "sc",
        })
    }
}

impl FromStr for Combiner {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "egc" => Ok(Combiner::Egc),
            "sc" => Ok(Combiner::Sc),
            other => Err(format!("unknown combiner `{other}` (expected egc or sc)")),
        }
    }
}

/// ML decision for a known effective gain: `argmin_k |y - g x_k|^2`.
pub fn ml_detect(y: Complex64, effective_gain: f64, constellation: &Constellation) -> usize {
    nearest_scaled(constellation.points(), effective_gain, y)
}

pub fn ml_detect_egc(
    y: Complex64,
    gains: UserGains<'_>,
    cfg: &LinkConfig,
    constellation: &Constellation,
) -> usize {
    ml_detect(y, Combiner::Egc.effective_gain(gains, cfg), constellation)
}

pub fn ml_detect_sc(
    y_p: Complex64,
    row_p: &[f64],
    cfg: &LinkConfig,
    constellation: &Constellation,
) -> usize {
    let g = cfg.per_link_scale() * row_p.iter().sum::<f64>();
    ml_detect(y_p, g, constellation)
}

/// Second-moment gain estimate `sqrt(max(mean|y|^2 - σ², 0))` for unit-energy
/// symbols, where `noise_variance` is the variance of the noise in `block`.
pub fn blind_gain_estimate(block: &[Complex64], noise_variance: f64) -> Result<f64> {
    if block.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "blind estimation needs at least 2 samples (got {})",
            block.len()
        )));
    }
    let power = block.iter().map(|y| y.norm_sqr()).sum::<f64>() / block.len() as f64;
    Ok((power - noise_variance).max(0.0).sqrt())
}

/// User with the largest post-combining effective gain, lowest index on ties.
pub fn allocate_best_user(channel: &ChannelMatrix, combiner: Combiner, cfg: &LinkConfig) -> usize {
    let mut best = 0;
    let mut best_gain = f64::NEG_INFINITY;
    for u in 0..channel.n_users() {
        let g = combiner.effective_gain(channel.user(u), cfg);
        if g > best_gain {
            best_gain = g;
            best = u;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::qam_constellation;
    use crate::rng::Streams;
    use crate::turbulence::{draw_channel, TurbulenceRegime};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg(n_tx: usize, n_rx: usize, noise: f64) -> LinkConfig {
        LinkConfig::new(1.0, n_tx, n_rx, 1, noise).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(LinkConfig::new(0.0, 1, 1, 1, 1.0).is_err());
        assert!(LinkConfig::new(1.0, 0, 1, 1, 1.0).is_err());
        assert!(LinkConfig::new(1.0, 1, 1, 1, -1.0).is_err());
        assert!(LinkConfig::new(1.0, 1, 1, 1, 0.0).is_ok());
        assert!((noise_variance_for_es_n0_db(10.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn noiseless_transmission_scaling() {
        let mut rng = Streams::new(1).rng(&[0]);
        let x = c(0.3, -0.7);
        let siso = LinkConfig::new(2.5, 1, 1, 1, 0.0).unwrap();
        let y = transmit(x, UserGains::new(1, 1, &[1.0]).unwrap(), &siso, &mut rng);
        assert_eq!(y.0, vec![x * 2.5]);
        // the 1/N_t split cancels the sum over two unit gains
        let y = transmit(
            x,
            UserGains::new(1, 2, &[1.0, 1.0]).unwrap(),
            &cfg(2, 1, 0.0),
            &mut rng,
        );
        assert!((y.0[0] - x).norm() < 1e-15);
    }

    #[test]
    fn pure_noise_has_requested_variance() {
        let mut rng = Streams::new(2).rng(&[0]);
        let link = cfg(1, 1, 0.3);
        let gains = [1.0];
        let g = UserGains::new(1, 1, &gains).unwrap();
        let n = 100_000;
        let (mut p, mut re2) = (0.0, 0.0);
        for _ in 0..n {
            let y = transmit(c(0.0, 0.0), g, &link, &mut rng).0[0];
            p += y.norm_sqr();
            re2 += y.re * y.re;
        }
        let (p, re2) = (p / n as f64, re2 / n as f64);
        // sd of the estimate is 0.3 / sqrt(n) ~ 1e-3
        assert!((p - 0.3).abs() < 5e-3, "{p}");
        assert!((re2 - 0.15).abs() < 4e-3, "{re2}");
    }

    #[test]
    fn superposition_properties() {
        let a = ReceivedVector(vec![c(1.0, 0.0), c(0.0, 2.0)]);
        let b = ReceivedVector(vec![c(-0.5, 1.0), c(3.0, 0.0)]);
        let zero = ReceivedVector::zeros(2);
        let noise = ReceivedVector(vec![c(0.1, 0.1), c(-0.2, 0.0)]);
        let ab = superpose_interference(&[a.clone(), b.clone()], &noise).unwrap();
        let ba = superpose_interference(&[b, a.clone()], &noise).unwrap();
        assert_eq!(ab, ba);
        assert_eq!(
            superpose_interference(&[a.clone(), zero], &noise).unwrap(),
            superpose_interference(std::slice::from_ref(&a), &noise).unwrap()
        );
        let short = ReceivedVector::zeros(1);
        assert!(superpose_interference(&[a, short], &noise).is_err());
    }

    #[test]
    fn egc_examples() {
        let y = ReceivedVector(vec![c(1.0, 1.0), c(2.0, -1.0)]);
        assert_eq!(egc_combine(&y).unwrap(), c(3.0, 0.0));
        assert_eq!(
            egc_combine(&ReceivedVector(vec![c(0.4, 0.2)])).unwrap(),
            c(0.4, 0.2)
        );
        let scaled = ReceivedVector(y.0.iter().map(|v| v * 2.5).collect());
        assert!((egc_combine(&scaled).unwrap() - egc_combine(&y).unwrap() * 2.5).norm() < 1e-14);
        assert!(egc_combine(&ReceivedVector(vec![])).is_err());
    }

    #[test]
    fn sc_examples() {
        let y = ReceivedVector(vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let g = [0.5, 2.0];
        assert_eq!(
            sc_select(&y, UserGains::new(2, 1, &g).unwrap()).unwrap(),
            (1, c(2.0, 0.0))
        );
        let eq = [1.0, 1.0];
        assert_eq!(
            sc_select(&y, UserGains::new(2, 1, &eq).unwrap()).unwrap().0,
            0
        );
        let single = ReceivedVector(vec![c(0.3, 0.0)]);
        assert_eq!(
            sc_select(&single, UserGains::new(1, 1, &[0.1]).unwrap())
                .unwrap()
                .0,
            0
        );
        assert!(sc_select(&single, UserGains::new(2, 1, &g).unwrap()).is_err());
    }

    #[test]
    fn noiseless_ml_is_exact() {
        let mut rng = Streams::new(3).rng(&[0]);
        for m in [4, 16] {
            let con = qam_constellation(m).unwrap();
            for (n_tx, n_rx) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
                let link = cfg(n_tx, n_rx, 0.0);
                let ch = draw_channel(1, n_rx, n_tx, &TurbulenceRegime::STRONG, &mut rng);
                let g = ch.user(0);
                for k in 0..m {
                    let y = transmit(con.points()[k], g, &link, &mut rng);
                    assert_eq!(ml_detect_egc(egc_combine(&y).unwrap(), g, &link, &con), k);
                    let (p, yp) = sc_select(&y, g).unwrap();
                    assert_eq!(ml_detect_sc(yp, g.row(p), &link, &con), k);
                }
            }
        }
    }

    #[test]
    fn ml_argmin_is_invariant_under_joint_scaling() {
        let con = qam_constellation(16).unwrap();
        let mut rng = Streams::new(4).rng(&[0]);
        for _ in 0..1000 {
            let y = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let g = rng.random_range(0.05..3.0);
            let a = rng.random_range(0.1..10.0);
            assert_eq!(ml_detect(y, g, &con), ml_detect(y * a, g * a, &con));
        }
    }

    #[test]
    fn qpsk_midpoint_perturbation() {
        let con = qam_constellation(4).unwrap();
        let pts = con.points();
        // adjacent pairs differ in one coordinate
        for (a, b) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            let mid = (pts[a] + pts[b]) * 0.5;
            for (target, other) in [(a, b), (b, a)] {
                let y = mid + (pts[target] - pts[other]) * 1e-6;
                // brute-force enumeration of the four distances
                let brute = (0..4)
                    .min_by(|&i, &j| {
                        (y - pts[i])
                            .norm_sqr()
                            .partial_cmp(&(y - pts[j]).norm_sqr())
                            .unwrap()
                    })
                    .unwrap();
                assert_eq!(brute, target);
                assert_eq!(ml_detect(y, 1.0, &con), target);
            }
        }
    }

    #[test]
    fn ml_sc_matches_enumeration() {
        let con = qam_constellation(16).unwrap();
        let mut rng = Streams::new(5).rng(&[0]);
        let link = cfg(2, 2, 0.2);
        for _ in 0..1000 {
            let ch = draw_channel(1, 2, 2, &TurbulenceRegime::MODERATE, &mut rng);
            let k = rng.random_range(0..16);
            let y = transmit(con.points()[k], ch.user(0), &link, &mut rng);
            let (p, yp) = sc_select(&y, ch.user(0)).unwrap();
            let g = 0.5 * (ch.gain(0, p, 0) + ch.gain(0, p, 1));
            let mut best = (f64::INFINITY, 0);
            for (i, x) in con.points().iter().enumerate() {
                let d = (yp - x * g).norm_sqr();
                if d < best.0 {
                    best = (d, i);
                }
            }
            assert_eq!(ml_detect_sc(yp, ch.user(0).row(p), &link, &con), best.1);
        }
        // N_t = 1 reduces to nearest scaled point
        let one = cfg(1, 1, 0.1);
        assert_eq!(ml_detect_sc(con.points()[7] * 0.4, &[0.4], &one, &con), 7);
    }

    #[test]
    fn blind_estimator_cases() {
        let con = qam_constellation(4).unwrap();
        let block: Vec<_> = (0..100).map(|i| con.points()[i % 4] * 2.0).collect();
        assert!((blind_gain_estimate(&block, 0.0).unwrap() - 2.0).abs() < 1e-12);

        let mut rng = Streams::new(6).rng(&[0]);
        let noise: Vec<_> = (0..1000).map(|_| complex_noise(0.5, &mut rng)).collect();
        assert!(blind_gain_estimate(&noise, 0.5).unwrap() >= 0.0);
        assert!(blind_gain_estimate(&noise[..1], 0.5).is_err());

        let block: Vec<_> = (0..10_000)
            .map(|_| con.points()[rng.random_range(0..4)] + complex_noise(0.1, &mut rng))
            .collect();
        let g = blind_gain_estimate(&block, 0.1).unwrap();
        assert!((g - 1.0).abs() < 0.03, "{g}");
    }

    #[test]
    fn allocation_picks_strongest_user() {
        let link = LinkConfig::new(1.0, 1, 1, 3, 0.1).unwrap();
        let ch = ChannelMatrix::from_gains(3, 1, 1, vec![0.5, 2.0, 1.0]).unwrap();
        assert_eq!(allocate_best_user(&ch, Combiner::Egc, &link), 1);
        assert_eq!(allocate_best_user(&ch, Combiner::Sc, &link), 1);
        let single = ChannelMatrix::from_gains(1, 1, 1, vec![0.2]).unwrap();
        assert_eq!(allocate_best_user(&single, Combiner::Egc, &link), 0);

        let mut rng = Streams::new(7).rng(&[0]);
        let link = LinkConfig::new(1.0, 2, 2, 4, 0.1).unwrap();
        for combiner in [Combiner::Egc, Combiner::Sc] {
            for _ in 0..1000 {
                let ch = draw_channel(4, 2, 2, &TurbulenceRegime::STRONG, &mut rng);
                let gains: Vec<f64> = (0..4)
                    .map(|u| combiner.effective_gain(ch.user(u), &link))
                    .collect();
                let chosen = allocate_best_user(&ch, combiner, &link);
                assert!(gains.iter().all(|&g| g <= gains[chosen]));
            }
        }
    }

    #[test]
    fn allocation_gain_dominates_single_user() {
        let mut rng = Streams::new(8).rng(&[0]);
        let link = LinkConfig::new(1.0, 1, 1, 4, 0.1).unwrap();
        let n = 10_000;
        let (mut sel, mut single) = (0.0, 0.0);
        for _ in 0..n {
            let ch = draw_channel(4, 1, 1, &TurbulenceRegime::STRONG, &mut rng);
            let u = allocate_best_user(&ch, Combiner::Egc, &link);
            sel += Combiner::Egc.effective_gain(ch.user(u), &link);
            single += Combiner::Egc.effective_gain(ch.user(0), &link);
        }
        assert!(sel > single * 1.2, "{sel} vs {single}");
    }
}
