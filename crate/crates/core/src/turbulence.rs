//! Gamma-Gamma atmospheric turbulence.
//!
//! Intensities are unit-mean products `I = X * Y` of two independent Gamma
//! variates, `X ~ Gamma(α, 1/α)` and `Y ~ Gamma(β, 1/β)`. The density is
//! evaluated in its modified-Bessel form
//!
//! ```text
//! f(I) = 2 (αβ)^((α+β)/2) / (Γ(α) Γ(β)) · I^((α+β)/2 - 1) · K_{α-β}(2 sqrt(αβ I))
//! ```

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::quadrature;
use crate::special::{bessel_k_scaled, ln_gamma};
use crate::{Error, Result};

/// Effective large-scale (α) and small-scale (β) eddy counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceRegime {
    alpha: f64,
    beta: f64,
}

impl TurbulenceRegime {
    pub const STRONG: TurbulenceRegime = TurbulenceRegime {
        alpha: 4.2,
        beta: 1.4,
    };
    pub const MODERATE: TurbulenceRegime = TurbulenceRegime {
        alpha: 4.0,
        beta: 1.9,
    };
    pub const WEAK: TurbulenceRegime = TurbulenceRegime {
        alpha: 11.6,
        beta: 10.1,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Gamma-Gamma parameters must be positive and finite (alpha={alpha}, beta={beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `(1 + 1/α)(1 + 1/β) - 1`, the normalized intensity variance.
    pub fn scintillation_index(&self) -> f64 {
        scintillation_index(self)
    }

    /// `E[I^k]` for real `k > -min(α, β)`.
    pub fn moment(&self, k: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        (ln_gamma(a + k) + ln_gamma(b + k) - ln_gamma(a) - ln_gamma(b) - k * (a * b).ln()).exp()
    }

    /// Markov bound on `P(I > t)` using the best of a ladder of moments.
    pub fn tail_bound(&self, t: f64) -> f64 {
        (1..=120)
            .map(|i| {
                let k = 0.5 * i as f64;
                (self.moment(k).ln() - k * t.ln()).exp()
            })
            .fold(1.0, f64::min)
    }

    /// Smallest power-of-two-refined `t` with `tail_bound(t) <= mass`.
    pub fn truncation_point(&self, mass: f64) -> f64 {
        let mut hi = 1.0;
        while self.tail_bound(hi) > mass {
            hi *= 2.0;
        }
        let mut lo = hi / 2.0;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if self.tail_bound(mid) > mass {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

impl fmt::Display for TurbulenceRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GammaGamma(alpha={}, beta={})", self.alpha, self.beta)
    }
}

/// Channel fading law: Gamma-Gamma turbulence or none (all gains 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fading {
    None,
    GammaGamma(TurbulenceRegime),
}

impl Fading {
    pub fn name(&self) -> String {
        match self {
            Fading::None => "none".into(),
            Fading::GammaGamma(r) if *r == TurbulenceRegime::STRONG => "strong".into(),
            Fading::GammaGamma(r) if *r == TurbulenceRegime::MODERATE => "moderate".into(),
            Fading::GammaGamma(r) if *r == TurbulenceRegime::WEAK => "weak".into(),
            Fading::GammaGamma(r) => format!("custom:{},{}", r.alpha, r.beta),
        }
    }

    pub fn draw_channel<R: Rng + ?Sized>(
        &self,
        n_users: usize,
        n_rx: usize,
        n_tx: usize,
        rng: &mut R,
    ) -> ChannelMatrix {
        match self {
            Fading::None => ChannelMatrix::ones(n_users, n_rx, n_tx),
            Fading::GammaGamma(regime) => draw_channel(n_users, n_rx, n_tx, regime, rng),
        }
    }
}

impl FromStr for Fading {
    type Err = String;

    /// `strong`, `moderate`, `weak`, `none`, or `custom:<alpha>,<beta>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "strong" => Ok(Fading::GammaGamma(TurbulenceRegime::STRONG)),
            "moderate" => Ok(Fading::GammaGamma(TurbulenceRegime::MODERATE)),
            "weak" => Ok(Fading::GammaGamma(TurbulenceRegime::WEAK)),
            "none" => Ok(Fading::None),
            other => {
                let body = other
                    .strip_prefix("custom:")
                    .ok_or_else(|| format!("unknown regime `{other}`"))?;
                let (a, b) = body
                    .split_once(',')
                    .ok_or_else(|| "custom regime needs `custom:<alpha>,<beta>`".to_string())?;
                let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| e.to_string());
                TurbulenceRegime::new(parse(a)?, parse(b)?)
                    .map(Fading::GammaGamma)
                    .map_err(|e| e.to_string())
            }
        }
    }
}

/// Unit-mean Gamma-Gamma intensity distribution.
#[derive(Debug, Clone, Copy)]
pub struct GammaGamma {
    large: Gamma<f64>,
    small: Gamma<f64>,
}

impl GammaGamma {
    pub fn new(regime: &TurbulenceRegime) -> Self {
        // parameters were validated by TurbulenceRegime::new
        Self {
            large: Gamma::new(regime.alpha, 1.0 / regime.alpha).expect("valid gamma shape"),
            small: Gamma::new(regime.beta, 1.0 / regime.beta).expect("valid gamma shape"),
        }
    }
}

impl Distribution<f64> for GammaGamma {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let i = self.large.sample(rng) * self.small.sample(rng);
            // shapes below one can underflow to zero
            if i > 0.0 {
                return i;
            }
        }
    }
}

pub fn sample_gamma_gamma<R: Rng + ?Sized>(regime: &TurbulenceRegime, rng: &mut R) -> f64 {
    GammaGamma::new(regime).sample(rng)
}

pub fn scintillation_index(regime: &TurbulenceRegime) -> f64 {
    (1.0 + 1.0 / regime.alpha) * (1.0 + 1.0 / regime.beta) - 1.0
}

/// Natural log of the Gamma-Gamma density.
pub fn gamma_gamma_ln_pdf(regime: &TurbulenceRegime, intensity: f64) -> Result<f64> {
    if !(intensity > 0.0) || !intensity.is_finite() {
        return Err(Error::Domain(format!(
            "Gamma-Gamma pdf needs a positive finite intensity (got {intensity})"
        )));
    }
    let (a, b) = (regime.alpha, regime.beta);
    let ab = a * b;
    let x = 2.0 * (ab * intensity).sqrt();
    let half_sum = 0.5 * (a + b);
    Ok(
        std::f64::consts::LN_2 + half_sum * ab.ln() - ln_gamma(a) - ln_gamma(b)
            + (half_sum - 1.0) * intensity.ln()
            + bessel_k_scaled(a - b, x).ln()
            - x,
    )
}

pub fn gamma_gamma_pdf(regime: &TurbulenceRegime, intensity: f64) -> Result<f64> {
    gamma_gamma_ln_pdf(regime, intensity).map(f64::exp)
}

/// Tabulated Gamma-Gamma CDF on `(0, I_max]`.
///
/// The density is integrated on a uniform grid in `u = sqrt(I)`, where the
/// integrand `2u f(u^2)` stays bounded near the origin, and interpolated
/// linearly in `u` between nodes.
#[derive(Debug, Clone)]
pub struct GammaGammaCdf {
    u_step: f64,
    u_max: f64,
    nodes: Vec<f64>,
}

impl GammaGammaCdf {
    pub const DEFAULT_TAIL_MASS: f64 = 1e-9;

    pub fn new(regime: &TurbulenceRegime, cells: usize) -> Self {
        let i_max = regime.truncation_point(Self::DEFAULT_TAIL_MASS);
        let u_max = i_max.sqrt();
        let u_step = u_max / cells as f64;
        let integrand = |u: f64| {
            if u <= 0.0 {
                0.0
            } else {
                2.0 * u * gamma_gamma_pdf(regime, u * u).unwrap_or(0.0)
            }
        };
        let mut nodes = Vec::with_capacity(cells + 1);
        nodes.push(0.0);
        let mut acc = 0.0;
        for c in 0..cells {
            let a = c as f64 * u_step;
            acc += quadrature::simpson(integrand, a, a + u_step, 4);
            nodes.push(acc);
        }
        Self {
            u_step,
            u_max,
            nodes,
        }
    }

    pub fn upper_limit(&self) -> f64 {
        self.u_max * self.u_max
    }

    /// Integral of the density over the tabulated range.
    pub fn total_mass(&self) -> f64 {
        *self.nodes.last().expect("table is never empty")
    }

    pub fn cdf(&self, intensity: f64) -> f64 {
        if intensity <= 0.0 {
            return 0.0;
        }
        let u = intensity.sqrt();
        if u >= self.u_max {
            return 1.0;
        }
        let pos = u / self.u_step;
        let k = (pos as usize).min(self.nodes.len() - 2);
        let w = pos - k as f64;
        self.nodes[k] * (1.0 - w) + self.nodes[k + 1] * w
    }
}

/// Per-slot intensity gains for every (user, receive aperture, transmit
/// aperture) link, stored row-major in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    n_users: usize,
    n_rx: usize,
    n_tx: usize,
    gains: Vec<f64>,
}

impl ChannelMatrix {
    pub fn from_gains(n_users: usize, n_rx: usize, n_tx: usize, gains: Vec<f64>) -> Result<Self> {
        if n_users == 0 || n_rx == 0 || n_tx == 0 {
            return Err(Error::InvalidParameter(
                "channel dimensions must be >= 1".into(),
            ));
        }
        let expected = n_users * n_rx * n_tx;
        if gains.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: gains.len(),
            });
        }
        if let Some(g) = gains.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "channel gains must be positive and finite (got {g})"
            )));
        }
        Ok(Self {
            n_users,
            n_rx,
            n_tx,
            gains,
        })
    }

    pub fn ones(n_users: usize, n_rx: usize, n_tx: usize) -> Self {
        Self {
            n_users,
            n_rx,
            n_tx,
            gains: vec![1.0; n_users * n_rx * n_tx],
        }
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn gain(&self, user: usize, rx: usize, tx: usize) -> f64 {
        self.gains[(user * self.n_rx + rx) * self.n_tx + tx]
    }

    pub fn user(&self, user: usize) -> UserGains<'_> {
        let len = self.n_rx * self.n_tx;
        UserGains {
            n_rx: self.n_rx,
            n_tx: self.n_tx,
            gains: &self.gains[user * len..(user + 1) * len],
        }
    }
}

/// The `N_r x N_t` gain block of one user.
#[derive(Debug, Clone, Copy)]
pub struct UserGains<'a> {
    n_rx: usize,
    n_tx: usize,
    gains: &'a [f64],
}

impl<'a> UserGains<'a> {
    pub fn new(n_rx: usize, n_tx: usize, gains: &'a [f64]) -> Result<Self> {
        if gains.len() != n_rx * n_tx || n_rx == 0 || n_tx == 0 {
            return Err(Error::Dimension {
                expected: n_rx * n_tx,
                got: gains.len(),
            });
        }
        Ok(Self { n_rx, n_tx, gains })
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn row(&self, rx: usize) -> &'a [f64] {
        &self.gains[rx * self.n_tx..(rx + 1) * self.n_tx]
    }

    /// `Σ_j I_{rx,j}`.
    pub fn row_sum(&self, rx: usize) -> f64 {
        self.row(rx).iter().sum()
    }

    /// `Σ_i Σ_j I_{i,j}`.
    pub fn total(&self) -> f64 {
        self.gains.iter().sum()
    }
}

pub fn draw_channel<R: Rng + ?Sized>(
    n_users: usize,
    n_rx: usize,
    n_tx: usize,
    regime: &TurbulenceRegime,
    rng: &mut R,
) -> ChannelMatrix {
    assert!(
        n_users >= 1 && n_rx >= 1 && n_tx >= 1,
        "channel counts must be >= 1"
    );
    let law = GammaGamma::new(regime);
    let gains = (0..n_users * n_rx * n_tx)
        .map(|_| law.sample(rng))
        .collect();
    ChannelMatrix {
        n_users,
        n_rx,
        n_tx,
        gains,
    }
}
