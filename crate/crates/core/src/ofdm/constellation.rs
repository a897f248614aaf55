//! Gray-coded QAM constellations with unit average power.

use crate::{Error, Result, C64};

/// A unit-average-power QAM constellation.
///
/// `points[label]` is the symbol carrying bit pattern `label`; bits are read
/// MSB first, so the first bit of each `log2(M)` group is the top bit of the
/// label.
#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    order: u32,
    points: Vec<C64>,
}

fn gray_inverse(mut g: u32) -> u32 {
    let mut i = g;
    while g > 0 {
        g >>= 1;
        i ^= g;
    }
    i
}

/// Odd integer amplitude of level index `i` on an axis with `levels` levels.
fn level(i: u32, levels: u32) -> f64 {
    2.0 * i as f64 - (levels as f64 - 1.0)
}

impl QamConstellation {
    pub fn new(order: u32) -> Result<Self> {
        let raw = match order {
            4 | 16 | 64 => square_points(order),
            32 => cross32_points(),
            other => return Err(Error::UnsupportedModOrder(other)),
        };
        let power = raw.iter().map(|p| p.norm_sqr()).sum::<f64>() / raw.len() as f64;
        let scale = power.sqrt().recip();
        let points = raw.into_iter().map(|p| p * scale).collect();
        Ok(Self { order, points })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    /// Points indexed by bit label.
    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn point(&self, label: u32) -> C64 {
        self.points[label as usize]
    }

    /// Mean power over the M unique points (1 by construction, kept explicit
    /// for the EVM denominator).
    pub fn mean_power(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Hard decision: label of the nearest point.
    pub fn nearest_label(&self, sample: C64) -> u32 {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (sample - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best as u32
    }

    pub fn nearest_point(&self, sample: C64) -> C64 {
        self.points[self.nearest_label(sample) as usize]
    }
}

/// Square M-QAM: the upper half of the label selects the in-phase level, the
/// lower half the quadrature level, each Gray coded.
fn square_points(order: u32) -> Vec<C64> {
    let bits = order.trailing_zeros();
    let half = bits / 2;
    let levels = 1u32 << half;
    let mask = levels - 1;
    (0..order)
        .map(|label| {
            let i = gray_inverse(label >> half);
            let q = gray_inverse(label & mask);
            C64::new(level(i, levels), level(q, levels))
        })
        .collect()
}

/// 32-point cross constellation (6x6 grid minus corners).
///
/// Labels start from an 8x4 Gray rectangle (3 in-phase bits, 2 quadrature
/// bits). The eight points of the two outermost in-phase columns (|I| = 7)
/// are folded onto the missing rows |Q| = 5 at |I| = |Q_old|, keeping the
/// sign of I and taking the sign of Q from the old quadrature level. A fully
/// Gray labeling does not exist for cross constellations; the folded points
/// keep a one-bit distance to most of their new neighbours.
fn cross32_points() -> Vec<C64> {
    (0..32u32)
        .map(|label| {
            let i = level(gray_inverse(label >> 2), 8);
            let q = level(gray_inverse(label & 3), 4);
            if i.abs() == 7.0 {
                C64::new(i.signum() * q.abs(), q.signum() * 5.0)
            } else {
                C64::new(i, q)
            }
        })
        .collect()
}
