use num_complex::Complex64;
use rand::Rng;

use super::scenario::{ScenarioSpec, UserMode};
use crate::link::{
    allocate_best_user, complex_noise, draw_noise, egc_combine, sc_select, select_aperture,
    superpose_interference, transmit_noiseless, Combiner, LinkConfig, ReceivedVector,
};
use crate::modem::Constellation;
use crate::turbulence::ChannelMatrix;

/// Who is decoded in a slot and how each transmitting user reaches the
/// combiner output.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotGeometry {
    pub target: usize,
    /// Aperture chosen by selection combining.
    pub aperture: Option<usize>,
    /// `(user, coefficient)` for every transmitting user; the combined
    /// observation is `Σ coefficient * x_user + combined noise`.
    pub coefficients: Vec<(usize, f64)>,
}

impl SlotGeometry {
    pub fn new(spec: &ScenarioSpec, cfg: &LinkConfig, channel: &ChannelMatrix) -> Self {
        let target = match spec.user_mode {
            UserMode::MultiuserAllocation => allocate_best_user(channel, spec.combiner, cfg),
            UserMode::SingleUser | UserMode::MultiuserInterference => 0,
        };
        let aperture = match spec.combiner {
            Combiner::Sc => Some(select_aperture(channel.user(target))),
            Combiner::Egc => None,
        };
        let active: Vec<usize> = match spec.user_mode {
            UserMode::MultiuserInterference => (0..channel.n_users()).collect(),
            _ => vec![target],
        };
        let scale = cfg.per_link_scale();
        let coefficients = active
            .into_iter()
            .map(|u| {
                let g = channel.user(u);
                let c = match aperture {
                    Some(p) => scale * g.row_sum(p),
                    None => scale * g.total(),
                };
                (u, c)
            })
            .collect();
        Self {
            target,
            aperture,
            coefficients,
        }
    }

    /// Effective gain of the decoded user.
    pub fn target_gain(&self) -> f64 {
        self.coefficients
            .iter()
            .find(|(u, _)| *u == self.target)
            .map(|(_, c)| *c)
            .expect("target always transmits")
    }

    /// Observation from per-user symbols and freshly drawn noise, computed
    /// directly from the coefficients.
    pub fn observe<R: Rng + ?Sized>(
        &self,
        points: &[Complex64],
        symbols: &[usize],
        n_rx: usize,
        noise_variance: f64,
        rng: &mut R,
    ) -> Complex64 {
        let signal: Complex64 = self
            .coefficients
            .iter()
            .map(|&(u, c)| points[symbols[u]] * c)
            .sum();
        let noise = match self.aperture {
            Some(p) => {
                let mut picked = Complex64::new(0.0, 0.0);
                for i in 0..n_rx {
                    let n = complex_noise(noise_variance, rng);
                    if i == p {
                        picked = n;
                    }
                }
                picked
            }
            None => (0..n_rx).map(|_| complex_noise(noise_variance, rng)).sum(),
        };
        signal + noise
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    /// Scalar entering the detector.
    pub observation: Complex64,
    pub target: usize,
    pub target_gain: f64,
    pub geometry: SlotGeometry,
    pub channel: ChannelMatrix,
}

/// Builds the combined observation of one slot through the link operations:
/// per-user faded signals, one shared noise draw, then the combiner.
pub fn compose_slot(
    spec: &ScenarioSpec,
    cfg: &LinkConfig,
    channel: ChannelMatrix,
    constellation: &Constellation,
    symbols: &[usize],
    noise: &ReceivedVector,
) -> SlotOutcome {
    let geometry = SlotGeometry::new(spec, cfg, &channel);
    let per_user: Vec<ReceivedVector> = geometry
        .coefficients
        .iter()
        .map(|&(u, _)| transmit_noiseless(constellation.points()[symbols[u]], channel.user(u), cfg))
        .collect();
    let y = superpose_interference(&per_user, noise).expect("all vectors have n_rx entries");
    let observation = match spec.combiner {
        Combiner::Egc => egc_combine(&y).expect("n_rx >= 1"),
        Combiner::Sc => {
            sc_select(&y, channel.user(geometry.target))
                .expect("dims agree")
                .1
        }
    };
    SlotOutcome {
        observation,
        target: geometry.target,
        target_gain: geometry.target_gain(),
        geometry,
        channel,
    }
}

/// Draws a fresh channel and noise for one slot and returns what the
/// detector sees. `symbols` holds one symbol index per user.
pub fn simulate_slot<R: Rng + ?Sized>(
    spec: &ScenarioSpec,
    cfg: &LinkConfig,
    constellation: &Constellation,
    symbols: &[usize],
    rng: &mut R,
) -> SlotOutcome {
    assert_eq!(symbols.len(), spec.n_users, "one symbol per user");
    let channel = spec
        .fading
        .draw_channel(spec.n_users, spec.n_rx, spec.n_tx, rng);
    let noise = draw_noise(spec.n_rx, cfg.noise_variance, rng);
    compose_slot(spec, cfg, channel, constellation, symbols, &noise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::qam_constellation;
    use crate::pipelines::DetectorKind;
    use crate::rng::Streams;
    use crate::turbulence::{Fading, TurbulenceRegime};

    const STRONG: Fading = Fading::GammaGamma(TurbulenceRegime::STRONG);

    #[test]
    fn identity_chain() {
        let spec = ScenarioSpec::siso(Fading::None, 16, DetectorKind::QamMlPerfect);
        let cfg = spec.link_config(0.0).unwrap();
        let con = qam_constellation(16).unwrap();
        let mut rng = Streams::new(1).rng(&[0]);
        for k in 0..16 {
            let out = simulate_slot(&spec, &cfg, &con, &[k], &mut rng);
            assert_eq!(out.observation, con.points()[k]);
            assert_eq!(out.target_gain, 1.0);
        }
    }

    #[test]
    fn allocation_with_one_user_matches_single_user() {
        let single = ScenarioSpec::siso(STRONG, 4, DetectorKind::QamMlPerfect).with_apertures(
            Combiner::Egc,
            2,
            2,
        );
        let mut alloc = single.clone();
        alloc.user_mode = UserMode::MultiuserAllocation;
        let cfg = single.link_config(0.1).unwrap();
        let con = qam_constellation(4).unwrap();
        let s = Streams::new(2);
        for t in 0..50 {
            let a = simulate_slot(&single, &cfg, &con, &[t % 4], &mut s.rng(&[t as u64]));
            let b = simulate_slot(&alloc, &cfg, &con, &[t % 4], &mut s.rng(&[t as u64]));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn silent_interferers_reduce_to_single_user() {
        // a zero-energy "symbol" stands in for a silent interferer
        let con = crate::modem::normalize_constellation(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ])
        .unwrap();
        let spec = ScenarioSpec::siso(STRONG, 4, DetectorKind::QamMlPerfect)
            .with_users(UserMode::MultiuserInterference, 3)
            .with_apertures(Combiner::Egc, 2, 2);
        let single = ScenarioSpec::siso(STRONG, 4, DetectorKind::QamMlPerfect).with_apertures(
            Combiner::Egc,
            2,
            2,
        );
        let cfg = spec.link_config(0.05).unwrap();
        let mut rng = Streams::new(3).rng(&[0]);
        for _ in 0..100 {
            let ch = STRONG.draw_channel(3, 2, 2, &mut rng);
            let noise = draw_noise(2, 0.05, &mut rng);
            let one = ChannelMatrix::from_gains(
                1,
                2,
                2,
                ch.user(0)
                    .row(0)
                    .iter()
                    .chain(ch.user(0).row(1))
                    .copied()
                    .collect(),
            )
            .unwrap();
            let a = compose_slot(&spec, &cfg, ch, &con, &[1, 2, 2], &noise);
            let b = compose_slot(&single, &cfg, one, &con, &[1], &noise);
            assert_eq!(a.observation, b.observation);
            assert_eq!(a.target_gain, b.target_gain);
        }
    }

    #[test]
    fn coefficients_reproduce_link_path() {
        let con = qam_constellation(16).unwrap();
        let mut rng = Streams::new(4).rng(&[0]);
        for mode in [
            UserMode::MultiuserAllocation,
            UserMode::MultiuserInterference,
        ] {
            for combiner in [Combiner::Egc, Combiner::Sc] {
                let spec = ScenarioSpec::siso(STRONG, 16, DetectorKind::QamDnn)
                    .with_users(mode, 3)
                    .with_apertures(combiner, 2, 3);
                let cfg = spec.link_config(0.2).unwrap();
                for _ in 0..200 {
                    let symbols: Vec<usize> = (0..3).map(|_| rng.random_range(0..16)).collect();
                    let out = simulate_slot(&spec, &cfg, &con, &symbols, &mut rng);
                    let zero = ReceivedVector::zeros(3);
                    let noiseless =
                        compose_slot(&spec, &cfg, out.channel.clone(), &con, &symbols, &zero);
                    let direct: Complex64 = out
                        .geometry
                        .coefficients
                        .iter()
                        .map(|&(u, c)| con.points()[symbols[u]] * c)
                        .sum();
                    assert!((noiseless.observation - direct).norm() < 1e-12);
                }
            }
        }
    }
}
