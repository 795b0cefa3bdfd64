//! Square QAM constellations, one-hot labels and energy normalization.
//!
//! All constellations carry unit average symbol energy, so `Es = 1` and the
//! noise variance alone sets Es/N0.

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Result<Complex64> {
        self.points
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index,
                size: self.points.len(),
            })
    }

    /// `(1/M) Σ |p|^2`.
    pub fn average_energy(&self) -> f64 {
        average_energy(&self.points)
    }

    pub fn mean(&self) -> Complex64 {
        self.points.iter().sum::<Complex64>() / self.points.len() as f64
    }

    /// Smallest distance between two distinct points.
    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                best = best.min((a - b).norm());
            }
        }
        best
    }

    /// Index of the point closest to `y` (lowest index on ties).
    pub fn nearest(&self, y: Complex64) -> usize {
        nearest_scaled(&self.points, 1.0, y)
    }
}

fn average_energy(points: &[Complex64]) -> f64 {
    points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64
}

/// `argmin_k |y - gain * points[k]|^2`, ties to the lowest index.
pub(crate) fn nearest_scaled(points: &[Complex64], gain: f64, y: Complex64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, p) in points.iter().enumerate() {
        let d = (y - p * gain).norm_sqr();
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

fn gray_to_binary(mut g: usize) -> usize {
    let mut b = 0;
    while g != 0 {
        b ^= g;
        g >>= 1;
    }
    b
}

/// Square M-QAM, Gray-coded per axis, normalized to unit average energy.
///
/// Symbol index `k` splits into an in-phase label `k / L` and a quadrature
/// label `k % L` with `L = sqrt(M)`; each label is Gray-decoded to its
/// amplitude level, so neighbouring levels differ in one label bit.
pub fn qam_constellation(order: usize) -> Result<Constellation> {
    let side = (order as f64).sqrt().round() as usize;
    if order < 4 || side * side != order || !side.is_power_of_two() {
        return Err(Error::UnsupportedOrder(order));
    }
    let level = |label: usize| (2 * gray_to_binary(label)) as f64 - (side - 1) as f64;
    let raw: Vec<Complex64> = (0..order)
        .map(|k| Complex64::new(level(k / side), level(k % side)))
        .collect();
    normalize_constellation(&raw)
}

/// Scales `raw` by one positive factor so the average energy is 1.
pub fn normalize_constellation(raw: &[Complex64]) -> Result<Constellation> {
    if raw.len() < 2 {
        return Err(Error::InvalidParameter(
            "a constellation needs at least two points".into(),
        ));
    }
    if raw.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
        return Err(Error::InvalidParameter(
            "constellation points must be finite".into(),
        ));
    }
    let energy = average_energy(raw);
    if energy <= 0.0 {
        return Err(Error::InvalidParameter(
            "cannot normalize an all-zero constellation".into(),
        ));
    }
    let scale = energy.sqrt().recip();
    Ok(Constellation {
        points: raw.iter().map(|p| p * scale).collect(),
    })
}

pub fn modulate(index: usize, constellation: &Constellation) -> Result<Complex64> {
    constellation.point(index)
}

/// Length-M indicator of one symbol index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneHot {
    len: usize,
    hot: usize,
}

impl OneHot {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn hot_index(&self) -> usize {
        self.hot
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.len];
        v[self.hot] = 1.0;
        v
    }
}

pub fn one_hot(index: usize, order: usize) -> Result<OneHot> {
    if index >= order {
        return Err(Error::IndexOutOfRange { index, size: order });
    }
    Ok(OneHot {
        len: order,
        hot: index,
    })
}

/// Index of the largest entry, first one on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
